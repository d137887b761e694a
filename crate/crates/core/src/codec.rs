//! Byte encodings: matrices, plaintext blocks, framed protocol messages and
//! persisted entity states. Everything is big-endian with one byte per field
//! element.
//!
//! Frame layout:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "GEG1"
//! 4       1     message type (0x01..=0x07)
//! 5       1     dimension d
//! 6       4     payload length L, u32 big-endian
//! 10      L     payload
//! ```

use std::fmt;

use thiserror::Error;

use crate::commuting::DiagonalSpec;
use crate::field::Field;
use crate::matrix::Matrix;
use crate::protocol::{CipherBlock, EntityState, Phase, PrivateKeys, Role, SharedParams};
use crate::{Fp251, MatrixFp};

pub const MAGIC: [u8; 4] = *b"GEG1";
pub const HEADER_LEN: usize = 10;
/// Modulus every matrix-bearing frame is encoded under.
pub const WIRE_MODULUS: u8 = 251;

const STATE_MARKER: u8 = b'S';
const PRIVATE_MARKER: [u8; 4] = *b"PRIV";

/// Plaintext bytes per base-251 digit group.
const CHUNK_BYTES: usize = 7;
/// Base-251 digits per group; 251^8 > 2^56.
const CHUNK_DIGITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("modulus {0} does not fit one byte per element")]
    UnsupportedModulus(u64),
    #[error("dimension {0} is not supported by this encoding")]
    InvalidDimension(usize),
    #[error("expected {expected} bytes, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("byte {value} at offset {offset} is not a field element")]
    ByteOutOfRange { offset: usize, value: u8 },
    #[error("truncated input: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("unknown message type {0:#04x}")]
    UnknownType(u8),
    #[error("payload of {msg_type} must be {expected} bytes, got {actual}")]
    PayloadLength {
        msg_type: MessageType,
        expected: usize,
        actual: usize,
    },
    #[error("{0} trailing bytes after frame")]
    TrailingBytes(usize),
    #[error("unexpected message type {0}")]
    UnexpectedType(MessageType),
    #[error("digit group {0} does not encode a 56-bit value")]
    CorruptBlock(usize),
    #[error("malformed padding")]
    Padding,
    #[error("no blocks to decode")]
    EmptyInput,
    #[error("malformed state file: {0}")]
    BadState(&'static str),
}

type WireResult<T> = std::result::Result<T, WireError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MessageType {
    BasisInit = 0x01,
    GeneratorInit = 0x02,
    InitialToken = 0x03,
    SessionOpenToken = 0x04,
    SessionAckToken = 0x05,
    CipherBlock = 0x06,
    ContextParams = 0x07,
}

impl MessageType {
    pub fn from_byte(b: u8) -> WireResult<Self> {
        Ok(match b {
            0x01 => Self::BasisInit,
            0x02 => Self::GeneratorInit,
            0x03 => Self::InitialToken,
            0x04 => Self::SessionOpenToken,
            0x05 => Self::SessionAckToken,
            0x06 => Self::CipherBlock,
            0x07 => Self::ContextParams,
            other => return Err(WireError::UnknownType(other)),
        })
    }

    /// Number of `d × d` matrices carried in the payload.
    pub fn matrix_count(self) -> usize {
        match self {
            Self::CipherBlock => 2,
            Self::ContextParams => 0,
            _ => 1,
        }
    }

    pub fn payload_len(self, dim: usize) -> usize {
        match self {
            Self::ContextParams => 1,
            t => t.matrix_count() * dim * dim,
        }
    }
}

impl fmt::Display for MessageType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({:#04x})", self, *self as u8)
    }
}

/// Row-major, one byte per entry.
pub fn matrix_to_bytes<F: Field>(m: &Matrix<F>) -> WireResult<Vec<u8>> {
    if F::MODULUS > 256 {
        return Err(WireError::UnsupportedModulus(F::MODULUS));
    }
    Ok(m.entries().iter().map(|x| x.to_u64() as u8).collect())
}

pub fn bytes_to_matrix<F: Field>(dim: usize, bytes: &[u8]) -> WireResult<Matrix<F>> {
    if F::MODULUS > 256 {
        return Err(WireError::UnsupportedModulus(F::MODULUS));
    }
    if dim < 2 {
        return Err(WireError::InvalidDimension(dim));
    }
    if bytes.len() != dim * dim {
        return Err(WireError::LengthMismatch {
            expected: dim * dim,
            actual: bytes.len(),
        });
    }
    let mut entries = Vec::with_capacity(bytes.len());
    for (offset, &b) in bytes.iter().enumerate() {
        if b as u64 >= F::MODULUS {
            return Err(WireError::ByteOutOfRange { offset, value: b });
        }
        entries.push(F::from_u64(b as u64));
    }
    Ok(Matrix::new(dim, entries).expect("length checked"))
}

/// Plaintext bytes carried by one `d × d` block: `7·d²/8`.
pub fn block_capacity(dim: usize) -> WireResult<usize> {
    let digits = dim * dim;
    if dim < 2 || !digits.is_multiple_of(CHUNK_DIGITS) {
        return Err(WireError::InvalidDimension(dim));
    }
    let cap = digits / CHUNK_DIGITS * CHUNK_BYTES;
    if cap > u8::MAX as usize {
        return Err(WireError::InvalidDimension(dim));
    }
    Ok(cap)
}

fn chunk_to_digits(chunk: &[u8], out: &mut Vec<Fp251>) {
    let mut v = chunk.iter().fold(0u64, |acc, &b| acc << 8 | b as u64);
    let mut digits = [0u8; CHUNK_DIGITS];
    for d in digits.iter_mut().rev() {
        *d = (v % WIRE_MODULUS as u64) as u8;
        v /= WIRE_MODULUS as u64;
    }
    out.extend(digits.iter().map(|&d| Fp251::new(d)));
}

fn digits_to_chunk(digits: &[Fp251], group: usize, out: &mut Vec<u8>) -> WireResult<()> {
    let v = digits
        .iter()
        .fold(0u64, |acc, d| acc * WIRE_MODULUS as u64 + d.value() as u64);
    if v >> 56 != 0 {
        return Err(WireError::CorruptBlock(group));
    }
    out.extend_from_slice(&v.to_be_bytes()[1..]);
    Ok(())
}

/// Splits `data` into message matrices.
///
/// Padding of `L ∈ [1, capacity]` bytes, each equal to `L`, is always
/// appended; then every 7-byte chunk becomes 8 base-251 digits and `d²`
/// digits fill one matrix row-major.
pub fn encode_plaintext(data: &[u8], dim: usize) -> WireResult<Vec<MatrixFp>> {
    let cap = block_capacity(dim)?;
    let pad = cap - data.len() % cap;
    let mut padded = Vec::with_capacity(data.len() + pad);
    padded.extend_from_slice(data);
    padded.resize(data.len() + pad, pad as u8);

    Ok(padded
        .chunks(cap)
        .map(|block| {
            let mut digits = Vec::with_capacity(dim * dim);
            for chunk in block.chunks(CHUNK_BYTES) {
                chunk_to_digits(chunk, &mut digits);
            }
            Matrix::new(dim, digits).expect("capacity matches d²")
        })
        .collect())
}

/// Inverse of [`encode_plaintext`].
pub fn decode_plaintext(blocks: &[MatrixFp]) -> WireResult<Vec<u8>> {
    let first = blocks.first().ok_or(WireError::EmptyInput)?;
    let dim = first.dim();
    let cap = block_capacity(dim)?;
    let mut out = Vec::with_capacity(blocks.len() * cap);
    for (b, block) in blocks.iter().enumerate() {
        if block.dim() != dim {
            return Err(WireError::InvalidDimension(block.dim()));
        }
        for (g, digits) in block.entries().chunks(CHUNK_DIGITS).enumerate() {
            digits_to_chunk(digits, b * (dim * dim / CHUNK_DIGITS) + g, &mut out)?;
        }
    }
    let pad = *out.last().expect("at least one block") as usize;
    if pad == 0 || pad > cap || out[out.len() - pad..].iter().any(|&b| b as usize != pad) {
        return Err(WireError::Padding);
    }
    out.truncate(out.len() - pad);
    Ok(out)
}

/// One framed protocol message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub msg_type: MessageType,
    pub dim: u8,
    pub payload: Vec<u8>,
}

impl WireMessage {
    /// A single-matrix message (setup matrices and tokens).
    pub fn matrix(msg_type: MessageType, m: &MatrixFp) -> WireResult<Self> {
        if msg_type.matrix_count() != 1 {
            return Err(WireError::UnexpectedType(msg_type));
        }
        Ok(Self {
            msg_type,
            dim: wire_dim(m.dim())?,
            payload: matrix_to_bytes(m)?,
        })
    }

    pub fn cipher_block(c: &CipherBlock<Fp251>) -> WireResult<Self> {
        let mut payload = matrix_to_bytes(&c.y1)?;
        payload.extend(matrix_to_bytes(&c.y2)?);
        Ok(Self {
            msg_type: MessageType::CipherBlock,
            dim: wire_dim(c.y1.dim())?,
            payload,
        })
    }

    pub fn context_params(dim: usize) -> WireResult<Self> {
        Ok(Self {
            msg_type: MessageType::ContextParams,
            dim: wire_dim(dim)?,
            payload: vec![WIRE_MODULUS],
        })
    }

    pub fn to_matrix(&self) -> WireResult<MatrixFp> {
        if self.msg_type.matrix_count() != 1 {
            return Err(WireError::UnexpectedType(self.msg_type));
        }
        bytes_to_matrix(self.dim as usize, &self.payload)
    }

    pub fn to_cipher_block(&self) -> WireResult<CipherBlock<Fp251>> {
        if self.msg_type != MessageType::CipherBlock {
            return Err(WireError::UnexpectedType(self.msg_type));
        }
        let half = self.payload.len() / 2;
        Ok(CipherBlock {
            y1: bytes_to_matrix(self.dim as usize, &self.payload[..half])?,
            y2: bytes_to_matrix(self.dim as usize, &self.payload[half..])?,
        })
    }

    pub fn frame(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(self.msg_type as u8);
        out.push(self.dim);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses exactly one frame; any byte after it is an error.
    pub fn parse(bytes: &[u8]) -> WireResult<Self> {
        let (msg, used) = Self::parse_prefix(bytes)?;
        if used != bytes.len() {
            return Err(WireError::TrailingBytes(bytes.len() - used));
        }
        Ok(msg)
    }

    /// Parses one frame from the front of `bytes`, returning it and the
    /// number of bytes consumed.
    pub fn parse_prefix(bytes: &[u8]) -> WireResult<(Self, usize)> {
        if bytes.len() < HEADER_LEN {
            return Err(WireError::Truncated {
                needed: HEADER_LEN,
                available: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
        if magic != MAGIC {
            return Err(if magic[..3] == MAGIC[..3] {
                WireError::UnsupportedVersion(magic[3])
            } else {
                WireError::BadMagic(magic)
            });
        }
        let msg_type = MessageType::from_byte(bytes[4])?;
        let dim = bytes[5];
        if dim < 2 {
            return Err(WireError::InvalidDimension(dim as usize));
        }
        let declared = u32::from_be_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
        let expected = msg_type.payload_len(dim as usize);
        if declared != expected {
            return Err(WireError::PayloadLength {
                msg_type,
                expected,
                actual: declared,
            });
        }
        let body = &bytes[HEADER_LEN..];
        if body.len() < declared {
            return Err(WireError::Truncated {
                needed: HEADER_LEN + declared,
                available: bytes.len(),
            });
        }
        let payload = &body[..declared];
        if msg_type == MessageType::ContextParams {
            if payload[0] != WIRE_MODULUS {
                return Err(WireError::UnsupportedModulus(payload[0] as u64));
            }
        } else if let Some(offset) = payload.iter().position(|&b| b >= WIRE_MODULUS) {
            return Err(WireError::ByteOutOfRange {
                offset: HEADER_LEN + offset,
                value: payload[offset],
            });
        }
        Ok((
            Self {
                msg_type,
                dim,
                payload: payload.to_vec(),
            },
            HEADER_LEN + declared,
        ))
    }

    /// Parses back-to-back frames until the input is exhausted.
    pub fn parse_stream(mut bytes: &[u8]) -> WireResult<Vec<Self>> {
        let mut out = Vec::new();
        while !bytes.is_empty() {
            let (msg, used) = Self::parse_prefix(bytes)?;
            out.push(msg);
            bytes = &bytes[used..];
        }
        Ok(out)
    }
}

fn wire_dim(dim: usize) -> WireResult<u8> {
    u8::try_from(dim)
        .ok()
        .filter(|&d| d >= 2)
        .ok_or(WireError::InvalidDimension(dim))
}

/// Serializes an entity state.
///
/// ```text
/// "GEG1" 'S' role phase d p
/// P (d²) G (d²)
/// flags: bit0 K, bit1 own token, bit2 peer token
/// [K (d²)] [own token (d²)] [peer token (d²)]
/// "PRIV" has_keys [k1 k2 D (d bytes)] m n
/// ```
pub fn encode_state<F: Field>(state: &EntityState<F>) -> WireResult<Vec<u8>> {
    if F::MODULUS > 255 {
        return Err(WireError::UnsupportedModulus(F::MODULUS));
    }
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.push(STATE_MARKER);
    out.push(match state.role() {
        Role::Initiator => 0,
        Role::Responder => 1,
    });
    out.push(state.phase() as u8);
    out.push(wire_dim(state.dim())?);
    out.push(F::MODULUS as u8);
    out.extend(matrix_to_bytes(state.basis())?);
    out.extend(matrix_to_bytes(state.generator())?);
    let optional = [state.key(), state.own_token(), state.peer_token()];
    let flags = optional
        .iter()
        .enumerate()
        .fold(0u8, |acc, (i, m)| acc | (m.is_some() as u8) << i);
    out.push(flags);
    for m in optional.into_iter().flatten() {
        out.extend(matrix_to_bytes(m)?);
    }
    out.extend_from_slice(&PRIVATE_MARKER);
    match (state.diagonal(), state.initial_exponents()) {
        (Some(diag), Some((k1, k2))) => {
            out.extend_from_slice(&[1, k1 as u8, k2 as u8]);
            out.extend(diag.lambdas().iter().map(|l| l.to_u64() as u8));
        }
        _ => out.push(0),
    }
    let (m, n) = state.mn();
    out.extend_from_slice(&[m.to_u64() as u8, n.to_u64() as u8]);
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> WireResult<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(WireError::Truncated {
                needed: self.pos + n,
                available: self.bytes.len(),
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn byte(&mut self) -> WireResult<u8> {
        Ok(self.take(1)?[0])
    }

    fn matrix<F: Field>(&mut self, dim: usize) -> WireResult<Matrix<F>> {
        bytes_to_matrix(dim, self.take(dim * dim)?)
    }
}

/// Inverse of [`encode_state`]. Rejects states that violate the protocol
/// invariants (singular matrices, zero exponents, missing key material).
pub fn decode_state<F: Field>(bytes: &[u8]) -> WireResult<EntityState<F>> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(WireError::BadMagic(magic.try_into().expect("4 bytes")));
    }
    if r.byte()? != STATE_MARKER {
        return Err(WireError::BadState("missing state marker"));
    }
    let role = match r.byte()? {
        0 => Role::Initiator,
        1 => Role::Responder,
        _ => return Err(WireError::BadState("unknown role")),
    };
    let phase = match r.byte()? {
        0 => Phase::Fresh,
        1 => Phase::Keyed,
        2 => Phase::SessionOpen,
        _ => return Err(WireError::BadState("unknown phase")),
    };
    let dim = r.byte()? as usize;
    if dim < 2 {
        return Err(WireError::InvalidDimension(dim));
    }
    let p = r.byte()?;
    if p as u64 != F::MODULUS {
        return Err(WireError::UnsupportedModulus(p as u64));
    }
    let basis = r.matrix(dim)?;
    let generator = r.matrix(dim)?;
    let flags = r.byte()?;
    if flags & !0b111 != 0 {
        return Err(WireError::BadState("unknown flags"));
    }
    let mut optional = [None, None, None];
    for (i, slot) in optional.iter_mut().enumerate() {
        if flags >> i & 1 == 1 {
            *slot = Some(r.matrix(dim)?);
        }
    }
    let [key, own_token, peer_token] = optional;
    if r.take(4)? != PRIVATE_MARKER {
        return Err(WireError::BadState("missing private marker"));
    }
    let private = match r.byte()? {
        0 => None,
        1 => {
            let k1 = r.byte()? as u64;
            let k2 = r.byte()? as u64;
            if k1 == 0 || k2 == 0 || k1 >= F::MODULUS || k2 >= F::MODULUS {
                return Err(WireError::BadState("initial exponents out of range"));
            }
            let lambdas = r
                .take(dim)?
                .iter()
                .map(|&b| F::from_u64(b as u64))
                .collect();
            let diagonal = DiagonalSpec::new(lambdas)
                .map_err(|_| WireError::BadState("invalid private diagonal"))?;
            Some(PrivateKeys { diagonal, k1, k2 })
        }
        _ => return Err(WireError::BadState("bad private-key flag")),
    };
    let m = r.byte()?;
    let n = r.byte()?;
    if m as u64 >= F::MODULUS || n as u64 >= F::MODULUS {
        return Err(WireError::BadState("session exponents out of range"));
    }
    if r.pos != bytes.len() {
        return Err(WireError::TrailingBytes(bytes.len() - r.pos));
    }
    let shared = SharedParams { basis, generator };
    EntityState::restore(
        role,
        phase,
        &shared,
        private,
        key,
        (F::from_u64(m as u64), F::from_u64(n as u64)),
        own_token,
        peer_token,
    )
    .map_err(|_| WireError::BadState("state violates protocol invariants"))
}
