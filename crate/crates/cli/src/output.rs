//! Text and key=value rendering of command output.

use std::fmt::Display;

use clap::ValueEnum;
use gl_elgamal::MatrixFp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned, human-readable.
    Text,
    /// One `key=value` pair per line; matrices as row-major hex.
    Kv,
}

pub struct Report {
    format: Format,
    out: String,
}

impl Report {
    pub fn new(format: Format) -> Self {
        Self {
            format,
            out: String::new(),
        }
    }

    pub fn heading(&mut self, title: &str) {
        if self.format == Format::Text {
            if !self.out.is_empty() {
                self.out.push('\n');
            }
            self.out.push_str(&format!("== {title} ==\n"));
        }
    }

    pub fn field(&mut self, key: &str, value: impl Display) {
        match self.format {
            Format::Text => self.out.push_str(&format!("{key}: {value}\n")),
            Format::Kv => self.out.push_str(&format!("{key}={value}\n")),
        }
    }

    /// A field shown only in kv output.
    pub fn kv(&mut self, key: &str, value: impl Display) {
        if self.format == Format::Kv {
            self.out.push_str(&format!("{key}={value}\n"));
        }
    }

    /// A free-form line; dropped in kv output.
    pub fn note(&mut self, line: impl Display) {
        if self.format == Format::Text {
            self.out.push_str(&format!("{line}\n"));
        }
    }

    pub fn matrix(&mut self, key: &str, m: &MatrixFp) {
        match self.format {
            Format::Text => self.out.push_str(&format!("{key} =\n{m}")),
            Format::Kv => {
                let bytes: Vec<u8> = m.entries().iter().map(|x| x.value()).collect();
                self.out
                    .push_str(&format!("{key}={}\n", hex::encode(bytes)));
            }
        }
    }

    pub fn print(self) {
        print!("{}", self.out);
    }
}
