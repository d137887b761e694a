//! Dense square matrices over a prime field.
//!
//! `Matrix<F>` doubles as the element type of `GL(d, F_p)`. Membership in the
//! group is checked (`is_invertible`), never assumed: the same type carries
//! singular plaintext blocks.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::group::MulGroup;
use crate::poly::Poly;
use crate::rng::RandomSource;

/// Square `d × d` matrix, entries stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    dim: usize,
    entries: Vec<F>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::InvalidDimension(dim))
    } else {
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn new(dim: usize, entries: Vec<F>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        check_dim(dim).expect("matrix dimension must be at least 2");
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| F::zero())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { F::one() } else { F::zero() })
    }

    pub fn diagonal(values: &[F]) -> Self {
        Self::from_fn(
            values.len(),
            |r, c| if r == c { values[r] } else { F::zero() },
        )
    }

    /// Companion matrix of a monic `f` of degree `d ≥ 2`: ones on the
    /// subdiagonal, last column `-f_0, …, -f_{d-1}` top to bottom.
    pub fn companion(f: &Poly<F>) -> Result<Self> {
        if !f.is_monic() {
            return Err(Error::NonMonic);
        }
        let d = f.degree().unwrap_or(0);
        check_dim(d)?;
        let coeffs = f.coeffs();
        Ok(Self::from_fn(d, |r, c| {
            if c == d - 1 {
                -coeffs[r]
            } else if r == c + 1 {
                F::one()
            } else {
                F::zero()
            }
        }))
    }

    /// Uniform over all `d × d` matrices.
    pub fn random(rng: &mut RandomSource, dim: usize) -> Self {
        Self::from_fn(dim, |_, _| rng.element())
    }

    /// Uniform over `GL(d, F_p)`: rejection on `det = 0`.
    pub fn random_invertible(rng: &mut RandomSource, dim: usize) -> Self {
        Self::random_invertible_counted(rng, dim).0
    }

    /// As [`Matrix::random_invertible`], also returning the number of draws.
    pub fn random_invertible_counted(rng: &mut RandomSource, dim: usize) -> (Self, u32) {
        let mut attempts = 0;
        loop {
            attempts += 1;
            let m = Self::random(rng, dim);
            if m.is_invertible() {
                return (m, attempts);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn trace(&self) -> F {
        (0..self.dim)
            .map(|i| self[(i, i)])
            .fold(F::zero(), |a, b| a + b)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| r == c || self[(r, c)].is_zero()))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let d = self.dim;
        let mut out = Vec::with_capacity(d * d);
        for r in 0..d {
            let row = self.row(r);
            for c in 0..d {
                out.push(F::dot((0..d).map(|k| (row[k], rhs.entries[k * d + c]))));
            }
        }
        Ok(Self {
            dim: d,
            entries: out,
        })
    }

    /// Gauss–Jordan on `[A | I]`, taking the first nonzero pivot found
    /// scanning down each column.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(d).entries;
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| !a[r * d + col].is_zero())
                .ok_or(Error::Singular)?;
            if pivot != col {
                for k in 0..d {
                    a.swap(pivot * d + k, col * d + k);
                    inv.swap(pivot * d + k, col * d + k);
                }
            }
            let scale = a[col * d + col].inv()?;
            for k in 0..d {
                a[col * d + k] *= scale;
                inv[col * d + k] *= scale;
            }
            for r in 0..d {
                let factor = a[r * d + col];
                if r == col || factor.is_zero() {
                    continue;
                }
                for k in 0..d {
                    let (ak, ik) = (a[col * d + k], inv[col * d + k]);
                    a[r * d + k] -= factor * ak;
                    inv[r * d + k] -= factor * ik;
                }
            }
        }
        Ok(Self {
            dim: d,
            entries: inv,
        })
    }

    /// Determinant by forward elimination (first nonzero pivot per column).
    pub fn determinant(&self) -> F {
        let d = self.dim;
        let mut a = self.entries.clone();
        let mut det = F::one();
        for col in 0..d {
            let Some(pivot) = (col..d).find(|&r| !a[r * d + col].is_zero()) else {
                return F::zero();
            };
            if pivot != col {
                for k in 0..d {
                    a.swap(pivot * d + k, col * d + k);
                }
                det = -det;
            }
            let p = a[col * d + col];
            det *= p;
            let p_inv = p.inv().expect("pivot is nonzero");
            for r in col + 1..d {
                let factor = a[r * d + col] * p_inv;
                if factor.is_zero() {
                    continue;
                }
                for k in col..d {
                    let ak = a[col * d + k];
                    a[r * d + k] -= factor * ak;
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        !self.determinant().is_zero()
    }

    /// `self^e` by square-and-multiply; `A^0 = I`.
    pub fn pow(&self, e: u64) -> Self {
        MulGroup::pow(self, e)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self * other == other * self
    }
}

impl<F: Field> MulGroup for Matrix<F> {
    fn identity_like(&self) -> Self {
        Self::identity(self.dim)
    }

    fn op(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (r, c): (usize, usize)) -> &F {
        assert!(r < self.dim && c < self.dim);
        &self.entries[r * self.dim + c]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        assert!(r < self.dim && c < self.dim);
        &mut self.entries[r * self.dim + c]
    }
}

/// Panics on dimension mismatch; use [`Matrix::checked_mul`] to get an error.
impl<F: Field> Mul for &Matrix<F> {
    type Output = Matrix<F>;
    fn mul(self, rhs: Self) -> Matrix<F> {
        self.checked_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl<F: Field> Mul for Matrix<F> {
    type Output = Matrix<F>;
    fn mul(self, rhs: Self) -> Matrix<F> {
        &self * &rhs
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = self.row(r).iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}{:?}", self.dim, self.dim, self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    type F = Fp<251>;
    type M = Matrix<F>;

    fn m5(v: [u8; 4]) -> Matrix<Fp<5>> {
        Matrix::new(2, v.iter().map(|&x| Fp::new(x)).collect()).unwrap()
    }

    /// Independent entry-by-entry product over plain integers.
    fn naive_mul_mod(a: &[u64], b: &[u64], d: usize, p: u64) -> Vec<u64> {
        let mut out = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0;
                for k in 0..d {
                    s += a[i * d + k] * b[k * d + j];
                }
                out[i * d + j] = s % p;
            }
        }
        out
    }

    fn as_u64<G: Field>(m: &Matrix<G>) -> Vec<u64> {
        m.entries().iter().map(|x| x.to_u64()).collect()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(M::new(1, vec![F::one()]), Err(Error::InvalidDimension(1)));
        assert_eq!(
            M::new(2, vec![F::one(); 3]),
            Err(Error::DimensionMismatch { left: 4, right: 3 })
        );
        let a = M::identity(2);
        let b = M::identity(3);
        assert_eq!(
            a.checked_mul(&b),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn identity_laws() {
        let mut rng = RandomSource::from_seed(b"id");
        let x = M::random(&mut rng, 8);
        assert_eq!(&M::identity(8) * &x, x);
        assert_eq!(&x * &M::identity(8), x);
        assert_eq!(M::identity(8).inverse().unwrap(), M::identity(8));
        assert_eq!(M::identity(8).determinant(), F::one());
        assert_eq!(x.pow(0), M::identity(8));
        assert_eq!(x.pow(1), x);
    }

    #[test]
    fn product_matches_naive_over_f5() {
        let mut rng = RandomSource::from_seed(b"f5");
        for _ in 0..200 {
            let a: Matrix<Fp<5>> = Matrix::random(&mut rng, 2);
            let b: Matrix<Fp<5>> = Matrix::random(&mut rng, 2);
            assert_eq!(
                as_u64(&(&a * &b)),
                naive_mul_mod(&as_u64(&a), &as_u64(&b), 2, 5)
            );
        }
        let mut rng = RandomSource::from_seed(b"f251");
        let a = M::random(&mut rng, 16);
        let b = M::random(&mut rng, 16);
        assert_eq!(
            as_u64(&(&a * &b)),
            naive_mul_mod(&as_u64(&a), &as_u64(&b), 16, 251)
        );
    }

    #[test]
    fn diagonal_inverse_and_det() {
        let mut rng = RandomSource::from_seed(b"diag");
        let lambdas: Vec<F> = (0..8).map(|_| rng.nonzero()).collect();
        let d = M::diagonal(&lambdas);
        let inv: Vec<F> = lambdas.iter().map(|l| l.inv().unwrap()).collect();
        assert_eq!(d.inverse().unwrap(), M::diagonal(&inv));
        let prod = lambdas.iter().fold(F::one(), |a, &b| a * b);
        assert_eq!(d.determinant(), prod);
    }

    #[test]
    fn exhaustive_f5_det_matches_cofactor() {
        let mut count = 0;
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    for d in 0..5 {
                        let m = m5([a, b, c, d]);
                        let cof = (a as i32 * d as i32 - b as i32 * c as i32).rem_euclid(5);
                        assert_eq!(m.determinant().value() as i32, cof);
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 625);
    }

    #[test]
    fn exhaustive_gl2_f3_inverse() {
        let mut invertible = 0;
        for code in 0..81u32 {
            let v: Vec<Fp<3>> = (0..4)
                .map(|k| Fp::new((code / 3u32.pow(k) % 3) as u8))
                .collect();
            let x = Matrix::new(2, v).unwrap();
            match x.inverse() {
                Ok(inv) => {
                    invertible += 1;
                    assert_eq!(&x * &inv, Matrix::identity(2));
                    assert_eq!(inv.inverse().unwrap(), x);
                }
                Err(e) => {
                    assert_eq!(e, Error::Singular);
                    assert!(x.determinant().is_zero());
                }
            }
        }
        assert_eq!(invertible, 48);
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let mut rng = RandomSource::from_seed(b"pow");
        let x = M::random(&mut rng, 8);
        let naive = (0..5).fold(M::identity(8), |acc, _| &acc * &x);
        assert_eq!(x.pow(5), naive);
        let naive = (0..37).fold(M::identity(8), |acc, _| &acc * &x);
        assert_eq!(x.pow(37), naive);
    }

    #[test]
    fn companion_of_x2_plus_1_over_f3() {
        let f = Poly::<Fp<3>>::from_u64s(&[1, 0, 1]);
        let c = Matrix::companion(&f).unwrap();
        assert_eq!(as_u64(&c), vec![0, 2, 1, 0]);
        let not_monic = Poly::<Fp<3>>::from_u64s(&[1, 0, 2]);
        assert_eq!(Matrix::companion(&not_monic), Err(Error::NonMonic));
        let linear = Poly::<Fp<3>>::from_u64s(&[1, 1]);
        assert_eq!(Matrix::companion(&linear), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn singular_is_reported() {
        let z = M::zero(4);
        assert_eq!(z.inverse(), Err(Error::Singular));
        assert!(!z.is_invertible());
    }

    #[test]
    fn random_invertible_replays_and_is_invertible() {
        let a = M::random_invertible(&mut RandomSource::from_seed(b"gl"), 8);
        let b = M::random_invertible(&mut RandomSource::from_seed(b"gl"), 8);
        assert_eq!(a, b);
        let mut rng = RandomSource::from_seed(b"gl-many");
        for _ in 0..200 {
            assert!(M::random_invertible(&mut rng, 8).is_invertible());
        }
    }

    fn arb_matrix(d: usize) -> impl Strategy<Value = M> {
        proptest::collection::vec(0u8..251, d * d)
            .prop_map(move |v| M::new(d, v.into_iter().map(F::new).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn associativity(a in arb_matrix(8), b in arb_matrix(8), c in arb_matrix(8)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn det_is_multiplicative(a in arb_matrix(8), b in arb_matrix(8)) {
            prop_assert_eq!((&a * &b).determinant(), a.determinant() * b.determinant());
        }

        #[test]
        fn pow_adds_exponents(a in arb_matrix(4), m in 0u64..300, n in 0u64..300) {
            prop_assert_eq!(a.pow(m + n), &a.pow(m) * &a.pow(n));
        }

        #[test]
        fn inverse_is_two_sided(a in arb_matrix(8)) {
            match a.inverse() {
                Ok(inv) => {
                    prop_assert_eq!(&a * &inv, M::identity(8));
                    prop_assert_eq!(&inv * &a, M::identity(8));
                }
                Err(_) => prop_assert!(a.determinant().is_zero()),
            }
        }
    }
}
