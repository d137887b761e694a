//! The hidden commutative subgroup `{P·D·P⁻¹ : D diagonal}` of `GL(d, F_p)`.
//!
//! Every element built from the same basis `P` commutes with every other one,
//! which is the property key agreement and decryption both rest on.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::rng::{sample_distinct_nonzero, RandomSource};

/// Diagonal entries with all values nonzero and pairwise distinct.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiagonalSpec<F> {
    lambdas: Vec<F>,
}

impl<F: Field> DiagonalSpec<F> {
    pub fn new(lambdas: Vec<F>) -> Result<Self> {
        let nonzero = lambdas.iter().all(|l| !l.is_zero());
        let mut sorted = lambdas.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if !nonzero || sorted.len() != lambdas.len() {
            return Err(Error::InvalidDiagonal);
        }
        Ok(Self { lambdas })
    }

    pub fn random(rng: &mut RandomSource, dim: usize) -> Result<Self> {
        Ok(Self {
            lambdas: sample_distinct_nonzero(rng, dim)?,
        })
    }

    pub fn lambdas(&self) -> &[F] {
        &self.lambdas
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    /// Entrywise power; `diag(λ)^e = diag(λ^e)`. The result need not keep
    /// distinct entries, so it is returned as a plain vector.
    pub fn pow(&self, e: u64) -> Vec<F> {
        self.lambdas.iter().map(|l| l.pow(e)).collect()
    }
}

/// A shared invertible basis `P` together with its cached inverse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CommutingContext<F> {
    basis: Matrix<F>,
    basis_inv: Matrix<F>,
}

impl<F: Field> CommutingContext<F> {
    pub fn new(basis: Matrix<F>) -> Result<Self> {
        let basis_inv = basis.inverse()?;
        let ctx = Self { basis, basis_inv };
        debug_assert!(ctx.is_consistent());
        Ok(ctx)
    }

    pub fn random(rng: &mut RandomSource, dim: usize) -> Self {
        Self::new(Matrix::random_invertible(rng, dim)).expect("sampled basis is invertible")
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn basis_inv(&self) -> &Matrix<F> {
        &self.basis_inv
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `P · P⁻¹ = I`.
    pub fn is_consistent(&self) -> bool {
        &self.basis * &self.basis_inv == Matrix::identity(self.dim())
    }

    /// `P · diag(values) · P⁻¹` for arbitrary diagonal values.
    pub fn conjugate_values(&self, values: &[F]) -> Result<Matrix<F>> {
        if values.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: values.len(),
            });
        }
        // Scale the columns of P instead of multiplying by the diagonal.
        let d = self.dim();
        let scaled = Matrix::from_fn(d, |r, c| self.basis[(r, c)] * values[c]);
        Ok(&scaled * &self.basis_inv)
    }

    pub fn conjugate_diagonal(&self, diag: &DiagonalSpec<F>) -> Result<Matrix<F>> {
        self.conjugate_values(diag.lambdas())
    }

    /// `P · diag(λ)^e · P⁻¹`, equal to `(P·diag(λ)·P⁻¹)^e` without powering
    /// a full matrix.
    pub fn conjugate_power(&self, diag: &DiagonalSpec<F>, e: u64) -> Result<Matrix<F>> {
        self.conjugate_values(&diag.pow(e))
    }

    /// Fresh subgroup element with distinct nonzero eigenvalues, returned
    /// together with its diagonal.
    pub fn sample_with_diagonal(&self, rng: &mut RandomSource) -> (Matrix<F>, DiagonalSpec<F>) {
        let diag = DiagonalSpec::random(rng, self.dim()).expect("d ≤ p - 1");
        let m = self.conjugate_diagonal(&diag).expect("dimensions agree");
        (m, diag)
    }

    pub fn sample_subgroup_element(&self, rng: &mut RandomSource) -> Matrix<F> {
        self.sample_with_diagonal(rng).0
    }

    /// `m ∈ {P·D·P⁻¹ : D invertible diagonal}`.
    pub fn contains(&self, m: &Matrix<F>) -> bool {
        if m.dim() != self.dim() {
            return false;
        }
        let d = &(&self.basis_inv * m) * &self.basis;
        d.is_diagonal() && (0..d.dim()).all(|i| !d[(i, i)].is_zero())
    }
}

/// `a · b = b · a` entrywise.
pub fn commutes<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> bool {
    a.dim() == b.dim() && a.commutes_with(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use num_traits::One;

    type F = Fp<251>;
    type M = Matrix<F>;

    #[test]
    fn diagonal_validation() {
        let f = |v: &[u8]| v.iter().map(|&x| F::new(x)).collect::<Vec<_>>();
        assert!(DiagonalSpec::new(f(&[1, 2, 3])).is_ok());
        assert_eq!(
            DiagonalSpec::new(f(&[1, 1, 3])),
            Err(Error::InvalidDiagonal)
        );
        assert_eq!(
            DiagonalSpec::new(f(&[0, 1, 3])),
            Err(Error::InvalidDiagonal)
        );
    }

    #[test]
    fn conjugating_identity_gives_identity() {
        let mut rng = RandomSource::from_seed(b"ctx");
        let ctx = CommutingContext::<F>::random(&mut rng, 8);
        assert!(ctx.is_consistent());
        assert_eq!(
            ctx.conjugate_values(&[F::one(); 8]).unwrap(),
            M::identity(8)
        );
        assert!(ctx.conjugate_values(&[F::one(); 3]).is_err());
    }

    #[test]
    fn similarity_invariants() {
        let mut rng = RandomSource::from_seed(b"sim");
        let ctx = CommutingContext::<F>::random(&mut rng, 8);
        for _ in 0..100 {
            let diag = DiagonalSpec::random(&mut rng, 8).unwrap();
            let a = ctx.conjugate_diagonal(&diag).unwrap();
            let prod = diag.lambdas().iter().fold(F::one(), |x, &y| x * y);
            let sum = diag.lambdas().iter().fold(F::new(0), |x, &y| x + y);
            assert_eq!(a.determinant(), prod);
            assert_eq!(a.trace(), sum);
            assert!(ctx.contains(&a));
        }
    }

    #[test]
    fn conjugate_power_matches_matrix_power() {
        let mut rng = RandomSource::from_seed(b"cpow");
        let ctx = CommutingContext::<F>::random(&mut rng, 8);
        let diag = DiagonalSpec::random(&mut rng, 8).unwrap();
        let a = ctx.conjugate_diagonal(&diag).unwrap();
        for e in [0u64, 1, 2, 19, 250, 251, 1000] {
            assert_eq!(ctx.conjugate_power(&diag, e).unwrap(), a.pow(e));
        }
    }

    #[test]
    fn same_context_elements_commute() {
        let mut rng = RandomSource::from_seed(b"comm");
        let ctx = CommutingContext::<F>::random(&mut rng, 8);
        let a = ctx.sample_subgroup_element(&mut rng);
        for _ in 0..200 {
            let j = ctx.sample_subgroup_element(&mut rng);
            assert!(commutes(&a, &j));
            assert!(j.is_invertible());
            assert!(commutes(&(&a * &j), &a));
            assert!(commutes(&a.pow(17), &j));
        }
        assert!(commutes(&a, &M::identity(8)));
    }

    #[test]
    fn random_matrices_do_not_commute() {
        let mut rng = RandomSource::from_seed(b"noncomm");
        let ctx = CommutingContext::<F>::random(&mut rng, 8);
        let mut failures = 0;
        for _ in 0..100 {
            let a = ctx.sample_subgroup_element(&mut rng);
            let g = M::random_invertible(&mut rng, 8);
            if !commutes(&a, &g) {
                failures += 1;
            }
            assert!(!ctx.contains(&g));
        }
        assert!(failures >= 99);
    }

    #[test]
    fn sampling_differs_across_seeds() {
        let ctx = CommutingContext::<F>::random(&mut RandomSource::from_seed(b"base"), 8);
        let a = ctx.sample_subgroup_element(&mut RandomSource::from_seed(b"one"));
        let b = ctx.sample_subgroup_element(&mut RandomSource::from_seed(b"two"));
        assert_ne!(a, b);
    }

    #[test]
    fn singular_basis_rejected() {
        assert_eq!(CommutingContext::new(M::zero(4)), Err(Error::Singular));
    }
}
