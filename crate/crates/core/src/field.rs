//! Prime-field scalars.
//!
//! [`Field`] is the scalar contract the matrix, polynomial and protocol layers
//! are written against. [`Fp`] is the concrete implementation: a residue
//! modulo a prime `P < 256`, stored in one byte. All arithmetic on it goes
//! through `u16`/`u32` intermediates, so no multi-word integer is ever needed.

use std::fmt;
use std::hash::Hash;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A finite prime field.
pub trait Field:
    Copy
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    /// The field characteristic `p` (equal to the field order).
    const MODULUS: u64;

    /// Reduces `v` modulo `p`.
    fn from_u64(v: u64) -> Self;

    /// Canonical representative in `[0, p)`.
    fn to_u64(self) -> u64;

    /// Multiplicative inverse; fails for zero.
    fn inv(self) -> Result<Self>;

    /// `self^e` by square-and-multiply. `0^0 = 1`.
    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// Sum of pairwise products. Implementations may defer reduction.
    fn dot<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Self, Self)>,
    {
        pairs
            .into_iter()
            .fold(Self::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Every element of the field in ascending order.
    fn elements() -> impl Iterator<Item = Self> {
        (0..Self::MODULUS).map(Self::from_u64)
    }
}

const fn is_prime_u8(p: u8) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u8;
    while (q as u16) * (q as u16) <= p as u16 {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// Residue modulo the prime `P`, kept canonical in `[0, P)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fp<const P: u8>(u8);

impl<const P: u8> Fp<P> {
    const PRIME_CHECK: () = assert!(is_prime_u8(P), "Fp modulus must be prime");

    pub const MODULUS: u8 = P;

    /// Builds the residue class of `v`.
    pub const fn new(v: u8) -> Self {
        #[allow(clippy::let_unit_value)]
        let () = Self::PRIME_CHECK;
        Self(v % P)
    }

    /// Accepts `v` only if it is already canonical.
    pub fn try_from_canonical(v: u8) -> Option<Self> {
        (v < P).then(|| Self::new(v))
    }

    pub const fn value(self) -> u8 {
        self.0
    }

    /// Inverse by Fermat exponentiation, `a^(p-2)`. Kept alongside the
    /// Euclidean inverse so the two can be cross-checked.
    pub fn inv_fermat(self) -> Result<Self> {
        if self.0 == 0 {
            return Err(Error::NotInvertible);
        }
        Ok(Field::pow(self, P as u64 - 2))
    }
}

impl<const P: u8> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u8> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl<const P: u8> Add for Fp<P> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let s = self.0 as u16 + rhs.0 as u16;
        Self(if s >= P as u16 { s - P as u16 } else { s } as u8)
    }
}

impl<const P: u8> Sub for Fp<P> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const P: u8> Neg for Fp<P> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Self(P - self.0)
        }
    }
}

impl<const P: u8> Mul for Fp<P> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self(((self.0 as u16 * rhs.0 as u16) % P as u16) as u8)
    }
}

impl<const P: u8> AddAssign for Fp<P> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const P: u8> SubAssign for Fp<P> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const P: u8> MulAssign for Fp<P> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const P: u8> Sum for Fp<P> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), Add::add)
    }
}

impl<const P: u8> Product for Fp<P> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), Mul::mul)
    }
}

impl<const P: u8> Zero for Fp<P> {
    fn zero() -> Self {
        Self::new(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u8> One for Fp<P> {
    fn one() -> Self {
        Self::new(1)
    }
}

impl<const P: u8> From<u8> for Fp<P> {
    fn from(v: u8) -> Self {
        Self::new(v)
    }
}

impl<const P: u8> Field for Fp<P> {
    const MODULUS: u64 = P as u64;

    fn from_u64(v: u64) -> Self {
        Self::new((v % P as u64) as u8)
    }

    fn to_u64(self) -> u64 {
        self.0 as u64
    }

    /// Extended Euclid on `(a, p)`, tracking only the coefficient of `a`.
    fn inv(self) -> Result<Self> {
        if self.0 == 0 {
            return Err(Error::NotInvertible);
        }
        let (mut r0, mut r1) = (P as i16, self.0 as i16);
        let (mut t0, mut t1) = (0i16, 1i16);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Self(t0.rem_euclid(P as i16) as u8))
    }

    /// Products accumulate in `u32`; 2^16 terms of at most 250² fit before a
    /// reduction is needed.
    fn dot<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Self, Self)>,
    {
        let mut acc = 0u32;
        for (i, (a, b)) in pairs.into_iter().enumerate() {
            acc += a.0 as u32 * b.0 as u32;
            if i & 0xffff == 0xffff {
                acc %= P as u32;
            }
        }
        Self((acc % P as u32) as u8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type F = Fp<251>;

    fn f(v: u8) -> F {
        F::new(v)
    }

    #[test]
    fn known_products() {
        assert_eq!(f(250) * f(250), f(1));
        assert_eq!(f(41) * f(178), f(19));
        for x in 0..=250u8 {
            assert_eq!(f(0) + f(x), f(x));
        }
    }

    #[test]
    fn known_inverses() {
        assert_eq!(f(1).inv().unwrap(), f(1));
        assert_eq!(f(2).inv().unwrap(), f(126));
        assert_eq!(f(250).inv().unwrap(), f(250));
        assert_eq!(f(0).inv(), Err(Error::NotInvertible));
        assert_eq!(f(0).inv_fermat(), Err(Error::NotInvertible));
    }

    #[test]
    fn euclid_and_fermat_agree() {
        for x in 1..=250u8 {
            let a = f(x);
            assert_eq!(a.inv().unwrap(), a.inv_fermat().unwrap());
            assert_eq!(a * a.inv().unwrap(), F::one());
        }
    }

    #[test]
    fn pow_cases() {
        for x in 0..=250u8 {
            assert_eq!(f(x).pow(0), F::one());
            if x != 0 {
                assert_eq!(f(x).pow(250), F::one());
            }
        }
        let naive = (0..10).fold(F::one(), |acc, _| acc * f(2));
        assert_eq!(naive, f(20));
        assert_eq!(f(2).pow(10), naive);
    }

    #[test]
    fn canonical_construction() {
        assert_eq!(F::new(251).value(), 0);
        assert_eq!(F::try_from_canonical(251), None);
        assert_eq!(F::try_from_canonical(250), Some(f(250)));
        assert_eq!(Fp::<2>::from_u64(7).value(), 1);
    }

    #[test]
    fn small_field_inverses() {
        for x in 1..7u8 {
            let a = Fp::<7>::new(x);
            assert_eq!(a * a.inv().unwrap(), Fp::<7>::one());
        }
        assert_eq!(Fp::<2>::new(1).inv().unwrap().value(), 1);
    }

    #[test]
    fn dot_matches_fold() {
        let xs: Vec<_> = (0..200u8).map(|i| (f(i), f(250 - i))).collect();
        let naive = xs.iter().fold(F::zero(), |acc, &(a, b)| acc + a * b);
        assert_eq!(F::dot(xs), naive);
    }

    proptest! {
        #[test]
        fn field_axioms_against_wide_integers(a in 0u8..251, b in 0u8..251, c in 0u8..251) {
            let (x, y, z) = (f(a), f(b), f(c));
            let (wa, wb, wc) = (a as u64, b as u64, c as u64);
            prop_assert_eq!((x + y).value() as u64, (wa + wb) % 251);
            prop_assert_eq!((x * y).value() as u64, (wa * wb) % 251);
            prop_assert_eq!((x - y).value() as u64, (wa + 251 - wb) % 251);
            prop_assert_eq!((-x).value() as u64, (251 - wa) % 251);
            prop_assert_eq!(((x + y) + z).value() as u64, (wa + wb + wc) % 251);
            prop_assert_eq!((x + y) + z, x + (y + z));
            prop_assert_eq!(x * (y + z), x * y + x * z);
            prop_assert_eq!((x * y) * z, x * (y * z));
        }

        #[test]
        fn inverse_is_two_sided(a in 1u8..251) {
            let x = f(a);
            let y = x.inv().unwrap();
            prop_assert_eq!(x * y, F::one());
            prop_assert_eq!(y * x, F::one());
        }
    }
}
