//! `glelgamal`: demo transcripts, file encryption, timings and cardinality
//! reports for the GL(d, F_251) ElGamal cipher.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use gl_elgamal::analysis::{
    companion_study, count_ambient, order_commutative_subgroup, order_gl, singular_probability,
};
use gl_elgamal::codec::{
    block_capacity, decode_plaintext, decode_state, encode_plaintext, encode_state, MessageType,
    WireError, WireMessage,
};
use gl_elgamal::protocol::{consistent, establish, run_session, session_exponent, setup_shared};
use gl_elgamal::{
    EntityStateFp, Error, Fp251, MatrixFp, RandomSource, Role, DEFAULT_DIM, DEFAULT_MODULUS,
};

use output::{Format, Report};

#[derive(Parser)]
#[command(name = "glelgamal", version, about = "ElGamal over GL(d, F_251)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Matrix order: 8 or 16 for protocol commands, 2..=16 for `analyze`.
    #[arg(long)]
    dim: Option<usize>,
    /// Hex seed for deterministic output; omitted means OS entropy.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run setup, key exchange, one session and one block in-process.
    Demo {
        #[command(flatten)]
        common: Common,
    },
    /// Run a key exchange and one session, saving both states.
    Keyexchange {
        #[command(flatten)]
        common: Common,
        /// Writes PATH.alice and PATH.bob.
        #[arg(long)]
        state: PathBuf,
    },
    /// Encrypt a file with the initiator state PATH.alice.
    Encrypt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        state: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Decrypt a file with the responder state PATH.bob.
    Decrypt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        state: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Mean timings of the four protocol phases.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        iterations: u64,
    },
    /// Group cardinalities, singular probability and a companion matrix.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Monte-Carlo trials for the singular probability.
        #[arg(long, default_value_t = 100_000)]
        iterations: u64,
    },
}

enum Failure {
    Invariant(String),
    Usage(String),
    Parse(String),
    Protocol(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Protocol(_) => 4,
            Failure::Io(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invariant(m)
            | Failure::Usage(m)
            | Failure::Parse(m)
            | Failure::Protocol(m)
            | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Wire(w) => Failure::Parse(w.to_string()),
            other => Failure::Protocol(other.to_string()),
        }
    }
}

impl From<WireError> for Failure {
    fn from(e: WireError) -> Self {
        Failure::Parse(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn rng_from(seed: &Option<String>) -> CliResult<RandomSource> {
    match seed {
        Some(s) => hex::decode(s)
            .map(|bytes| RandomSource::from_seed(&bytes))
            .map_err(|e| Failure::Usage(format!("--seed must be hex: {e}"))),
        None => Ok(RandomSource::cryptographic()),
    }
}

fn protocol_dim(dim: Option<usize>) -> CliResult<usize> {
    match dim.unwrap_or(DEFAULT_DIM) {
        d @ (8 | 16) => Ok(d),
        d => Err(Failure::Usage(format!("--dim must be 8 or 16, got {d}"))),
    }
}

fn analysis_dim(dim: Option<usize>) -> CliResult<usize> {
    match dim.unwrap_or(DEFAULT_DIM) {
        d @ 2..=16 => Ok(d),
        d => Err(Failure::Usage(format!("--dim must be in 2..=16, got {d}"))),
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_state(path: &Path, role: Role) -> CliResult<EntityStateFp> {
    let state = decode_state::<Fp251>(&read(path)?)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    if state.role() != role {
        return Err(Failure::Usage(format!(
            "{} holds the {:?} state, expected {role:?}",
            path.display(),
            state.role()
        )));
    }
    Ok(state)
}

fn check_dim(requested: Option<usize>, state: &EntityStateFp) -> CliResult<()> {
    match requested {
        Some(d) if d != state.dim() => Err(Failure::Usage(format!(
            "--dim {d} does not match the state dimension {}",
            state.dim()
        ))),
        _ => Ok(()),
    }
}

fn mn_line(report: &mut Report, state: &EntityStateFp) {
    let (m, n) = state.mn();
    let mn = session_exponent(m, n);
    report.note(format!("m={m}, n={n}, m·n={mn}"));
    report.kv("m", m);
    report.kv("n", n);
    report.kv("mn", mn);
}

fn demo(common: &Common) -> CliResult<()> {
    let dim = protocol_dim(common.dim)?;
    let mut rng = rng_from(&common.seed)?;
    let mut r = Report::new(common.format);

    r.heading("setup");
    r.field("p", DEFAULT_MODULUS);
    r.field("d", dim);
    let shared = setup_shared::<Fp251>(&mut rng, dim)?;
    r.matrix("P", &shared.basis);
    r.matrix("G", &shared.generator);

    r.heading("key generation");
    let mut alice = EntityStateFp::new(Role::Initiator, &shared)?;
    let mut bob = EntityStateFp::new(Role::Responder, &shared)?;
    let a_token = alice.keygen(&mut rng)?;
    let b_token = bob.keygen(&mut rng)?;
    r.matrix("A'", &a_token);
    r.matrix("B'", &b_token);

    r.heading("common key");
    alice.derive_session_key(&b_token)?;
    bob.derive_session_key(&a_token)?;
    if alice.key() != bob.key() {
        return Err(Failure::Invariant(
            "the two sides derived different keys".into(),
        ));
    }
    r.matrix("K", alice.key().expect("derived"));
    mn_line(&mut r, &alice);

    r.heading("session update");
    let opened = alice.open_session()?;
    let reply = bob.ack_session(&opened)?;
    alice.complete_session(&reply)?;
    if !consistent(&alice, &bob) {
        return Err(Failure::Invariant("session states diverged".into()));
    }
    r.matrix("K", alice.key().expect("derived"));
    mn_line(&mut r, &alice);
    r.matrix("P", alice.basis());
    r.matrix("G", alice.generator());
    r.matrix("A'", &opened);
    r.matrix("B'", &reply);

    r.heading("encipher");
    let h = MatrixFp::random(&mut rng, dim);
    r.matrix("H", &h);
    let block = alice.encrypt_for_peer(&h, &mut rng)?;
    r.matrix("y1", &block.y1);
    r.matrix("y2", &block.y2);

    r.heading("decipher");
    let recovered = bob.decrypt_block(&block)?;
    r.matrix("H", &recovered);
    let ok = recovered == h;
    r.field("round_trip", if ok { "ok" } else { "FAILED" });
    r.print();
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant(
            "recovered H differs from the original".into(),
        ))
    }
}

fn keyexchange(common: &Common, state: &Path) -> CliResult<()> {
    let dim = protocol_dim(common.dim)?;
    let mut rng = rng_from(&common.seed)?;
    let (mut alice, mut bob) = establish::<Fp251>(&mut rng, dim)?;
    run_session(&mut alice, &mut bob)?;
    if !consistent(&alice, &bob) {
        return Err(Failure::Invariant("session states diverged".into()));
    }
    let (a_path, b_path) = (with_suffix(state, ".alice"), with_suffix(state, ".bob"));
    write(&a_path, &encode_state(&alice)?)?;
    write(&b_path, &encode_state(&bob)?)?;
    eprintln!(
        "warning: both parties' private keys are now on local disk; this is a simulation aid, not key management"
    );
    let mut r = Report::new(common.format);
    r.field("d", dim);
    r.field("initiator_state", a_path.display());
    r.field("responder_state", b_path.display());
    mn_line(&mut r, &alice);
    r.print();
    Ok(())
}

fn encrypt(common: &Common, state: &Path, input: &Path, output: &Path) -> CliResult<()> {
    let alice = load_state(&with_suffix(state, ".alice"), Role::Initiator)?;
    check_dim(common.dim, &alice)?;
    let mut rng = rng_from(&common.seed)?;
    let data = read(input)?;
    let blocks = encode_plaintext(&data, alice.dim())?;
    let mut out = WireMessage::context_params(alice.dim())?.frame();
    for h in &blocks {
        let block = alice.encrypt_for_peer(h, &mut rng)?;
        out.extend(WireMessage::cipher_block(&block)?.frame());
    }
    write(output, &out)?;
    let mut r = Report::new(common.format);
    r.field("plaintext_bytes", data.len());
    r.field("block_capacity", block_capacity(alice.dim())?);
    r.field("blocks", blocks.len());
    r.field("ciphertext_bytes", out.len());
    r.print();
    Ok(())
}

fn decrypt(common: &Common, state: &Path, input: &Path, output: &Path) -> CliResult<()> {
    let bob = load_state(&with_suffix(state, ".bob"), Role::Responder)?;
    check_dim(common.dim, &bob)?;
    let bytes = read(input)?;
    let frames = WireMessage::parse_stream(&bytes)?;
    let (head, body) = frames
        .split_first()
        .ok_or(Failure::Parse("empty cipher stream".into()))?;
    if head.msg_type != MessageType::ContextParams {
        return Err(WireError::UnexpectedType(head.msg_type).into());
    }
    if head.dim as usize != bob.dim() {
        return Err(Failure::Protocol(format!(
            "stream is for d={}, state has d={}",
            head.dim,
            bob.dim()
        )));
    }
    let mut blocks = Vec::with_capacity(body.len());
    for frame in body {
        if frame.msg_type != MessageType::CipherBlock {
            return Err(WireError::UnexpectedType(frame.msg_type).into());
        }
        blocks.push(bob.decrypt_block(&frame.to_cipher_block()?)?);
    }
    let data = decode_plaintext(&blocks)?;
    write(output, &data)?;
    let mut r = Report::new(common.format);
    r.field("blocks", blocks.len());
    r.field("plaintext_bytes", data.len());
    r.print();
    Ok(())
}

const BUDGET_MS: f64 = 85.0;

fn bench(common: &Common, iterations: u64) -> CliResult<()> {
    let dim = protocol_dim(common.dim)?;
    if iterations == 0 {
        return Err(Failure::Usage("--iterations must be positive".into()));
    }
    let mut rng = rng_from(&common.seed)?;
    let mut totals = [Duration::ZERO; 4];
    for _ in 0..iterations {
        let t = Instant::now();
        let shared = setup_shared::<Fp251>(&mut rng, dim)?;
        totals[0] += t.elapsed();

        let t = Instant::now();
        let mut alice = EntityStateFp::new(Role::Initiator, &shared)?;
        let mut bob = EntityStateFp::new(Role::Responder, &shared)?;
        let ta = alice.keygen(&mut rng)?;
        let tb = bob.keygen(&mut rng)?;
        alice.derive_session_key(&tb)?;
        bob.derive_session_key(&ta)?;
        totals[1] += t.elapsed();

        let t = Instant::now();
        run_session(&mut alice, &mut bob)?;
        totals[2] += t.elapsed();

        let h = MatrixFp::random(&mut rng, dim);
        let t = Instant::now();
        let block = alice.encrypt_for_peer(&h, &mut rng)?;
        let back = bob.decrypt_block(&block)?;
        totals[3] += t.elapsed();
        if back != h {
            return Err(Failure::Invariant("benchmark round trip failed".into()));
        }
    }
    let means: Vec<f64> = totals
        .iter()
        .map(|t| t.as_secs_f64() * 1000.0 / iterations as f64)
        .collect();
    let phases = [
        ("setup", "setup of P and G", 0.12),
        (
            "key_exchange",
            "token exchange to first K and (m, n)",
            29.56,
        ),
        ("session_update", "session update", 52.94),
        ("encipher_decipher", "encipher-decipher cycle", 32.36),
    ];
    let mut r = Report::new(common.format);
    r.field("d", dim);
    r.field("iterations", iterations);
    for ((key, label, reference), mean) in phases.iter().zip(&means) {
        match common.format {
            Format::Text => r.note(format!(
                "{label:<38} mean {mean:>9.4} ms   (reference {reference} ms)"
            )),
            Format::Kv => r.field(&format!("{key}_ms"), format!("{mean:.6}")),
        }
    }
    let session: f64 = means[1..].iter().sum();
    r.field("full_session_ms", format!("{session:.4}"));
    r.field(
        "within_85ms",
        if session <= BUDGET_MS { "yes" } else { "NO" },
    );
    r.print();
    Ok(())
}

fn analyze(common: &Common, iterations: u64) -> CliResult<()> {
    let d = analysis_dim(common.dim)?;
    if iterations == 0 {
        return Err(Failure::Usage("--iterations must be positive".into()));
    }
    let mut rng = rng_from(&common.seed)?;
    let p = DEFAULT_MODULUS as u64;
    let mut r = Report::new(common.format);

    r.heading("parameters");
    r.field("p", p);
    r.field("d", d);

    r.heading("cardinalities");
    let gl = order_gl(d, p);
    r.field("order_gl", &gl.exact);
    r.field("order_gl_log10", format!("{:.4}", gl.log10));
    let ambient = count_ambient(d, p);
    r.field("all_matrices_log10", format!("{:.4}", ambient.all.log10));
    r.field("nilpotent_log10", format!("{:.4}", ambient.nilpotent.log10));

    r.heading("commutative subgroup");
    let sub = order_commutative_subgroup(d, p);
    r.field("subgroup_order", &sub.published.exact);
    r.field(
        "subgroup_order_log2",
        format!("{:.3}", sub.published.log2()),
    );
    r.field("distinct_nonzero_diagonals", &sub.distinct_nonzero.exact);
    r.field(
        "distinct_nonzero_diagonals_log2",
        format!("{:.3}", sub.distinct_nonzero.log2()),
    );
    r.field(
        "security_bits",
        format!("{:.0}", sub.published.log2().round()),
    );

    r.heading("singular probability");
    let est = singular_probability::<Fp251>(d, iterations, &mut rng);
    r.field("closed_form", format!("{:.6}", est.closed_form));
    r.field("monte_carlo", format!("{:.6}", est.monte_carlo));
    r.field("trials", est.trials);

    r.heading("companion matrix");
    let study = companion_study::<Fp251>(&mut rng, d)?;
    r.field("irreducible", &study.poly);
    r.field("trials", study.trials);
    match (study.order, study.group_order) {
        (Some(order), Some(group)) => {
            r.field("order", order);
            r.field("group_order", group);
            r.field("primitive", order == group);
        }
        _ => r.field("order", "not computed (p^d - 1 exceeds 64 bits)"),
    }
    r.print();
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Demo { common } => demo(common),
        Command::Keyexchange { common, state } => keyexchange(common, state),
        Command::Encrypt {
            common,
            state,
            input,
            output,
        } => encrypt(common, state, input, output),
        Command::Decrypt {
            common,
            state,
            input,
            output,
        } => decrypt(common, state, input, output),
        Command::Bench { common, iterations } => bench(common, *iterations),
        Command::Analyze { common, iterations } => analyze(common, *iterations),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
