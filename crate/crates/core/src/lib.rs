//! Generalized ElGamal cipher over the non-commutative group `GL(d, F_p)`.
//!
//! The algebra (field, matrices, polynomials, commuting subgroup) and the
//! protocol are generic over the scalar [`Field`]; the aliases below fix the
//! byte-sized field `F_251` the protocol is deployed with. All protocol
//! arithmetic stays in single bytes and `u16`/`u32` intermediates.
//!
//! This is research code. It has no constant-time guarantees and no
//! authentication of the exchanged tokens.

pub mod analysis;
pub mod codec;
pub mod commuting;
pub mod error;
pub mod factor;
pub mod field;
pub mod group;
pub mod matrix;
pub mod poly;
pub mod protocol;
pub mod rng;

pub use commuting::{commutes, CommutingContext, DiagonalSpec};
pub use error::{Error, Result};
pub use field::{Field, Fp};
pub use group::MulGroup;
pub use matrix::Matrix;
pub use poly::Poly;
pub use protocol::{CipherBlock, EntityState, Phase, Role, SharedParams};
pub use rng::{sample_distinct_nonzero, RandomSource, RngMode};

/// The protocol modulus: the largest prime below 256.
pub const DEFAULT_MODULUS: u8 = 251;

/// Default matrix order (64-bit security level).
pub const DEFAULT_DIM: usize = 8;

pub type Fp251 = Fp<DEFAULT_MODULUS>;
pub type MatrixFp = Matrix<Fp251>;
pub type PolyFp = Poly<Fp251>;
pub type EntityStateFp = EntityState<Fp251>;
pub type CipherBlockFp = CipherBlock<Fp251>;
pub type CommutingContextFp = CommutingContext<Fp251>;
pub type DiagonalSpecFp = DiagonalSpec<Fp251>;
