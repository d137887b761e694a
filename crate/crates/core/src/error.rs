use thiserror::Error;

use crate::codec::WireError;

/// Errors raised by the algebra, protocol and codec layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no multiplicative inverse")]
    NotInvertible,

    #[error("cannot draw {requested} distinct nonzero residues from a field with {available}")]
    ImpossibleRequest { requested: usize, available: u64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("matrix is singular")]
    Singular,

    #[error("polynomial is not monic")]
    NonMonic,

    #[error("polynomial division by zero")]
    DivisionByZero,

    #[error("group order p^d - 1 does not fit in 64 bits")]
    OrderOutOfRange,

    #[error("element order does not divide the supplied group order")]
    OrderNotDividing,

    #[error("diagonal entries must be nonzero and pairwise distinct")]
    InvalidDiagonal,

    #[error("protocol step `{step}` is not allowed in phase {phase:?}")]
    WrongPhase {
        step: &'static str,
        phase: crate::protocol::Phase,
    },

    #[error("protocol violation: {0}")]
    ProtocolViolation(&'static str),

    #[error("malformed ciphertext: {0}")]
    MalformedCiphertext(&'static str),

    #[error("instance exceeds the brute-force cost guard: {0}")]
    CostGuard(&'static str),

    #[error(transparent)]
    Wire(#[from] WireError),
}

pub type Result<T> = std::result::Result<T, Error>;
