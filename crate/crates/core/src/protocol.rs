//! Two-party generalized ElGamal over `GL(d, F_p)`.
//!
//! Step order for one pair of entities:
//!
//! 1. [`setup_shared`]: either side draws the public `P` and `G`.
//! 2. [`EntityState::keygen`] on both sides, tokens exchanged.
//! 3. [`EntityState::derive_session_key`] on both sides: common `K`, `(m, n)`.
//! 4. Per session: [`EntityState::open_session`] on the initiator,
//!    [`EntityState::ack_session`] on the responder,
//!    [`EntityState::complete_session`] back on the initiator.
//! 5. Any number of [`EntityState::encrypt_block`] /
//!    [`EntityState::decrypt_block`], then back to 4.
//!
//! Both sides apply the same deterministic update to `(K, m, n, P, G)`, so
//! after every completed step the two states agree on all five. There is no
//! in-band check of that agreement: a desynchronized pair decrypts garbage.

use crate::commuting::{CommutingContext, DiagonalSpec};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Initiator,
    Responder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Fresh,
    Keyed,
    SessionOpen,
}

/// ElGamal ciphertext for one message matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherBlock<F> {
    pub y1: Matrix<F>,
    pub y2: Matrix<F>,
}

/// The public pair `(P, G)` agreed at setup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedParams<F> {
    pub basis: Matrix<F>,
    pub generator: Matrix<F>,
}

/// Draws two independent invertible matrices `P` and `G`.
pub fn setup_shared<F: Field>(rng: &mut RandomSource, dim: usize) -> Result<SharedParams<F>> {
    if dim < 2 || dim as u64 > F::MODULUS - 1 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(SharedParams {
        basis: Matrix::random_invertible(rng, dim),
        generator: Matrix::random_invertible(rng, dim),
    })
}

fn first_nonzero<F: Field>(
    k: &Matrix<F>,
    cells: impl Iterator<Item = (usize, usize)>,
) -> Option<F> {
    cells.map(|rc| k[rc]).find(|v| !v.is_zero())
}

/// Derives the session exponents `(m, n)` from `K`.
///
/// `m` multiplies the first nonzero entries met scanning the anti-diagonal
/// from the bottom-left corner upward and from the top-right corner downward.
/// `n` does the same along the main diagonal from the top-left corner
/// downward and from the bottom-right corner upward. A diagonal with no
/// nonzero entry contributes `1·1`. Both results are nonzero.
pub fn extract_mn<F: Field>(k: &Matrix<F>) -> (F, F) {
    let d = k.dim();
    let pair = |a: Option<F>, b: Option<F>| match (a, b) {
        (Some(a), Some(b)) => a * b,
        _ => F::one(),
    };
    let m = pair(
        first_nonzero(k, (0..d).map(|i| (d - 1 - i, i))),
        first_nonzero(k, (0..d).map(|i| (i, d - 1 - i))),
    );
    let n = pair(
        first_nonzero(k, (0..d).map(|i| (i, i))),
        first_nonzero(k, (0..d).rev().map(|i| (i, i))),
    );
    (m, n)
}

/// Exponent applied to `K` at a session update: `m·n mod p`, never zero.
pub fn session_exponent<F: Field>(m: F, n: F) -> u64 {
    (m * n).to_u64()
}

/// Private material drawn at key generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PrivateKeys<F> {
    pub(crate) diagonal: DiagonalSpec<F>,
    pub(crate) k1: u64,
    pub(crate) k2: u64,
}

/// One party's view of the protocol.
#[derive(Debug, Clone)]
pub struct EntityState<F> {
    role: Role,
    phase: Phase,
    ctx: CommutingContext<F>,
    generator: Matrix<F>,
    private: Option<PrivateKeys<F>>,
    own_element: Option<Matrix<F>>,
    own_token: Option<Matrix<F>>,
    peer_token: Option<Matrix<F>>,
    key: Option<Matrix<F>>,
    m: F,
    n: F,
}

impl<F: Field> EntityState<F> {
    pub fn new(role: Role, shared: &SharedParams<F>) -> Result<Self> {
        let SharedParams { basis, generator } = shared;
        if basis.dim() != generator.dim() {
            return Err(Error::DimensionMismatch {
                left: basis.dim(),
                right: generator.dim(),
            });
        }
        if !generator.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(Self {
            role,
            phase: Phase::Fresh,
            ctx: CommutingContext::new(basis.clone())?,
            generator: generator.clone(),
            private: None,
            own_element: None,
            own_token: None,
            peer_token: None,
            key: None,
            m: F::one(),
            n: F::one(),
        })
    }

    /// Rebuilds a state from persisted parts, recomputing the private
    /// element `A = P·D·P⁻¹` and checking the state invariants.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn restore(
        role: Role,
        phase: Phase,
        shared: &SharedParams<F>,
        private: Option<PrivateKeys<F>>,
        key: Option<Matrix<F>>,
        mn: (F, F),
        own_token: Option<Matrix<F>>,
        peer_token: Option<Matrix<F>>,
    ) -> Result<Self> {
        let mut s = Self::new(role, shared)?;
        let dim = s.dim();
        let check = |m: &Option<Matrix<F>>| match m {
            Some(m) if m.dim() != dim => Err(Error::DimensionMismatch {
                left: dim,
                right: m.dim(),
            }),
            Some(m) if !m.is_invertible() => Err(Error::Singular),
            _ => Ok(()),
        };
        check(&key)?;
        check(&own_token)?;
        check(&peer_token)?;
        if let Some(p) = &private {
            if p.diagonal.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.diagonal.dim(),
                });
            }
            s.own_element = Some(s.ctx.conjugate_diagonal(&p.diagonal)?);
        }
        let complete = private.is_some() && key.is_some() && own_token.is_some();
        if phase > Phase::Fresh && !complete {
            return Err(Error::ProtocolViolation(
                "keyed state is missing key material",
            ));
        }
        if mn.0.is_zero() || mn.1.is_zero() {
            return Err(Error::ProtocolViolation(
                "session exponents must be nonzero",
            ));
        }
        s.phase = phase;
        s.private = private;
        s.key = key;
        s.m = mn.0;
        s.n = mn.1;
        s.own_token = own_token;
        s.peer_token = peer_token;
        Ok(s)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn basis(&self) -> &Matrix<F> {
        self.ctx.basis()
    }

    pub fn generator(&self) -> &Matrix<F> {
        &self.generator
    }

    pub fn context(&self) -> &CommutingContext<F> {
        &self.ctx
    }

    pub fn key(&self) -> Option<&Matrix<F>> {
        self.key.as_ref()
    }

    /// Current `(m, n)`; `(1, 1)` before key derivation.
    pub fn mn(&self) -> (F, F) {
        (self.m, self.n)
    }

    pub fn diagonal(&self) -> Option<&DiagonalSpec<F>> {
        self.private.as_ref().map(|p| &p.diagonal)
    }

    /// The setup exponents `(k1, k2)`.
    pub fn initial_exponents(&self) -> Option<(u64, u64)> {
        self.private.as_ref().map(|p| (p.k1, p.k2))
    }

    /// The private commuting element `A = P·D·P⁻¹` under the current `P`.
    pub fn own_element(&self) -> Option<&Matrix<F>> {
        self.own_element.as_ref()
    }

    pub fn own_token(&self) -> Option<&Matrix<F>> {
        self.own_token.as_ref()
    }

    pub fn peer_token(&self) -> Option<&Matrix<F>> {
        self.peer_token.as_ref()
    }

    fn require(&self, step: &'static str, allowed: &[Phase]) -> Result<()> {
        if allowed.contains(&self.phase) {
            Ok(())
        } else {
            Err(Error::WrongPhase {
                step,
                phase: self.phase,
            })
        }
    }

    fn private_keys(&self) -> Result<&PrivateKeys<F>> {
        self.private
            .as_ref()
            .ok_or(Error::ProtocolViolation("key generation has not run"))
    }

    fn check_peer_token(&self, token: &Matrix<F>) -> Result<()> {
        if token.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: token.dim(),
            });
        }
        if !token.is_invertible() {
            return Err(Error::ProtocolViolation("peer token is singular"));
        }
        Ok(())
    }

    /// `A^e1 · X · A^e2` for the private element `A`, via diagonal powers.
    fn sandwich(&self, x: &Matrix<F>, e1: u64, e2: u64) -> Result<Matrix<F>> {
        let diag = &self.private_keys()?.diagonal;
        let left = self.ctx.conjugate_power(diag, e1)?;
        let right = self.ctx.conjugate_power(diag, e2)?;
        Ok(&(&left * x) * &right)
    }

    /// Draws `k1, k2 ∈ [1, p-1]` and a distinct-nonzero diagonal `D`, sets
    /// `A = P·D·P⁻¹` and returns the token `A^k1 · G · A^k2`.
    pub fn keygen(&mut self, rng: &mut RandomSource) -> Result<Matrix<F>> {
        self.require("keygen", &[Phase::Fresh])?;
        let k1 = rng.exponent::<F>();
        let k2 = rng.exponent::<F>();
        let diagonal = DiagonalSpec::random(rng, self.dim())?;
        self.keygen_with(diagonal, k1, k2)
    }

    /// As [`EntityState::keygen`] with caller-chosen private values.
    pub fn keygen_with(
        &mut self,
        diagonal: DiagonalSpec<F>,
        k1: u64,
        k2: u64,
    ) -> Result<Matrix<F>> {
        self.require("keygen", &[Phase::Fresh])?;
        if diagonal.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: diagonal.dim(),
            });
        }
        self.own_element = Some(self.ctx.conjugate_diagonal(&diagonal)?);
        self.private = Some(PrivateKeys { diagonal, k1, k2 });
        let token = self.sandwich(&self.generator, k1, k2)?;
        self.own_token = Some(token.clone());
        Ok(token)
    }

    /// `K = A^k1 · B' · A^k2`, then `(m, n) = extract_mn(K)`.
    pub fn derive_session_key(&mut self, peer_token: &Matrix<F>) -> Result<()> {
        self.require("derive_session_key", &[Phase::Fresh])?;
        self.check_peer_token(peer_token)?;
        let (k1, k2) = {
            let p = self.private_keys()?;
            (p.k1, p.k2)
        };
        let key = self.sandwich(peer_token, k1, k2)?;
        let (m, n) = extract_mn(&key);
        self.key = Some(key);
        self.m = m;
        self.n = n;
        self.peer_token = Some(peer_token.clone());
        self.phase = Phase::Keyed;
        Ok(())
    }

    /// The shared update: `K ← K^(m·n)`, new `(m, n)`, `P ← K^m·P·K^n`,
    /// `G ← K^m·G·K^n`, `A ← P·D·P⁻¹`. Returns the new own token
    /// `A^m · G · A^n`.
    fn advance(&mut self) -> Result<Matrix<F>> {
        let key = self
            .key
            .as_ref()
            .ok_or(Error::ProtocolViolation("no session key"))?;
        let key = key.pow(session_exponent(self.m, self.n));
        let (m, n) = extract_mn(&key);
        let (km, kn) = (key.pow(m.to_u64()), key.pow(n.to_u64()));
        let basis = &(&km * self.ctx.basis()) * &kn;
        let generator = &(&km * &self.generator) * &kn;

        let ctx = CommutingContext::new(basis)?;
        debug_assert!(ctx.is_consistent());
        self.ctx = ctx;
        self.generator = generator;
        self.key = Some(key);
        self.m = m;
        self.n = n;

        let diag = self.private_keys()?.diagonal.clone();
        self.own_element = Some(self.ctx.conjugate_diagonal(&diag)?);
        let token = self.sandwich(&self.generator, m.to_u64(), n.to_u64())?;
        self.own_token = Some(token.clone());
        self.peer_token = None;
        Ok(token)
    }

    /// Starts a new cipher session and returns the token to send.
    pub fn open_session(&mut self) -> Result<Matrix<F>> {
        self.require("open_session", &[Phase::Keyed, Phase::SessionOpen])?;
        let token = self.advance()?;
        self.phase = Phase::SessionOpen;
        Ok(token)
    }

    /// Applies the same update on the responding side, stores the
    /// initiator's token and returns the reply token.
    pub fn ack_session(&mut self, peer_token: &Matrix<F>) -> Result<Matrix<F>> {
        self.require("ack_session", &[Phase::Keyed, Phase::SessionOpen])?;
        self.check_peer_token(peer_token)?;
        let token = self.advance()?;
        self.peer_token = Some(peer_token.clone());
        self.phase = Phase::SessionOpen;
        Ok(token)
    }

    /// Stores the responder's reply token on the initiating side.
    pub fn complete_session(&mut self, peer_token: &Matrix<F>) -> Result<()> {
        self.require("complete_session", &[Phase::SessionOpen])?;
        self.check_peer_token(peer_token)?;
        self.peer_token = Some(peer_token.clone());
        Ok(())
    }

    /// `y1 = J^m·G·J^n`, `y2 = H·(J^m·B'·J^n)` with a fresh `J` from the
    /// commuting subgroup.
    pub fn encrypt_block(
        &self,
        message: &Matrix<F>,
        peer_token: &Matrix<F>,
        rng: &mut RandomSource,
    ) -> Result<CipherBlock<F>> {
        self.require("encrypt_block", &[Phase::SessionOpen])?;
        self.check_peer_token(peer_token)?;
        if message.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: message.dim(),
            });
        }
        let (_, ephemeral) = self.ctx.sample_with_diagonal(rng);
        let jm = self.ctx.conjugate_power(&ephemeral, self.m.to_u64())?;
        let jn = self.ctx.conjugate_power(&ephemeral, self.n.to_u64())?;
        let y1 = &(&jm * &self.generator) * &jn;
        let mask = &(&jm * peer_token) * &jn;
        let y2 = message * &mask;
        Ok(CipherBlock { y1, y2 })
    }

    /// [`EntityState::encrypt_block`] against the stored peer token.
    pub fn encrypt_for_peer(
        &self,
        message: &Matrix<F>,
        rng: &mut RandomSource,
    ) -> Result<CipherBlock<F>> {
        let token = self
            .peer_token
            .as_ref()
            .ok_or(Error::ProtocolViolation("no peer token for this session"))?;
        self.encrypt_block(message, token, rng)
    }

    /// `H = y2 · (A^m · y1 · A^n)⁻¹`.
    pub fn decrypt_block(&self, block: &CipherBlock<F>) -> Result<Matrix<F>> {
        self.require("decrypt_block", &[Phase::SessionOpen])?;
        let d = self.dim();
        for m in [&block.y1, &block.y2] {
            if m.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: m.dim(),
                });
            }
        }
        let mask = self.sandwich(&block.y1, self.m.to_u64(), self.n.to_u64())?;
        let mask_inv = mask
            .inverse()
            .map_err(|_| Error::MalformedCiphertext("unmasking matrix is singular"))?;
        Ok(&block.y2 * &mask_inv)
    }
}

/// Runs setup, key generation and key derivation for an in-process pair.
pub fn establish<F: Field>(
    rng: &mut RandomSource,
    dim: usize,
) -> Result<(EntityState<F>, EntityState<F>)> {
    let shared = setup_shared(rng, dim)?;
    let mut alice = EntityState::new(Role::Initiator, &shared)?;
    let mut bob = EntityState::new(Role::Responder, &shared)?;
    let ta = alice.keygen(rng)?;
    let tb = bob.keygen(rng)?;
    alice.derive_session_key(&tb)?;
    bob.derive_session_key(&ta)?;
    Ok((alice, bob))
}

/// One open / ack / complete round between an in-process pair.
pub fn run_session<F: Field>(
    initiator: &mut EntityState<F>,
    responder: &mut EntityState<F>,
) -> Result<()> {
    let opened = initiator.open_session()?;
    let reply = responder.ack_session(&opened)?;
    initiator.complete_session(&reply)
}

/// True when both sides agree on `(K, m, n, P, G)`.
pub fn consistent<F: Field>(a: &EntityState<F>, b: &EntityState<F>) -> bool {
    a.key == b.key && a.mn() == b.mn() && a.basis() == b.basis() && a.generator == b.generator
}
