//! Polynomials over a prime field: arithmetic, the Rabin irreducibility test,
//! random irreducible generation, the irreducible-count formula, and element
//! orders in `F_p[x]/(f)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::factor;
use crate::field::Field;
use crate::group::{self, MulGroup};
use crate::rng::RandomSource;

/// Coefficients low degree first, with no trailing zeros.
/// The zero polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| F::from_u64(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![F::zero(), F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<F> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(F::one())
    }

    /// Scales to leading coefficient one; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let s = lc.inv().expect("leading coefficient is nonzero");
                Self::from_coeffs(self.coeffs.iter().map(|&c| c * s).collect())
            }
        }
    }

    pub fn scale(&self, s: F) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn eval(&self, x: F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, &c| acc * x + c)
    }

    /// Long division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lc_inv = divisor.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd] * lc_inv;
            quot[i] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= c * dc;
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mul_mod(&self, rhs: &Self, modulus: &Self) -> Result<Self> {
        (self * rhs).rem(modulus)
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, mut e: u64, modulus: &Self) -> Result<Self> {
        let mut base = self.rem(modulus)?;
        let mut acc = Self::one().rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus)?;
            }
            base = base.mul_mod(&base, modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Rabin's test for a monic `f` of degree `d ≥ 1`: `f` is irreducible iff
    /// `x^(p^d) ≡ x (mod f)` and `gcd(x^(p^(d/q)) - x, f) = 1` for every
    /// prime `q | d`. Non-monic or constant input returns `false`.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else {
            return false;
        };
        if d == 0 || !self.is_monic() {
            return false;
        }
        if d == 1 {
            return true;
        }
        let x = Self::x();
        let prime_divisors: Vec<usize> = factor::factorize(d as u64)
            .into_iter()
            .map(|(q, _)| q as usize)
            .collect();
        // frob[i] = x^(p^i) mod f
        let mut frob = x.rem(self).expect("f is nonzero");
        for i in 1..=d {
            frob = frob.pow_mod(F::MODULUS, self).expect("f is nonzero");
            if i < d && prime_divisors.iter().any(|&q| d / q == i) {
                let g = (&frob - &x).gcd(self);
                if g.degree() != Some(0) {
                    return false;
                }
            }
        }
        frob == x.rem(self).expect("f is nonzero")
    }

    /// Uniform monic polynomial of degree `d`.
    pub fn random_monic(rng: &mut RandomSource, d: usize) -> Self {
        let mut coeffs: Vec<F> = (0..d).map(|_| rng.element()).collect();
        coeffs.push(F::one());
        Self::from_coeffs(coeffs)
    }

    /// Uniform monic irreducible polynomial of degree `d ≥ 2`, by rejection.
    pub fn random_irreducible(rng: &mut RandomSource, d: usize) -> Result<Self> {
        Ok(Self::random_irreducible_counted(rng, d)?.0)
    }

    /// As [`Poly::random_irreducible`], also returning the number of trials.
    pub fn random_irreducible_counted(rng: &mut RandomSource, d: usize) -> Result<(Self, u32)> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let mut trials = 0;
        loop {
            trials += 1;
            let f = Self::random_monic(rng, d);
            if f.is_irreducible() {
                return Ok((f, trials));
            }
        }
    }
}

impl<F: Field> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: Self) -> Poly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Poly<F>, i| p.coeffs.get(i).copied().unwrap_or_else(F::zero);
        Poly::from_coeffs((0..n).map(|i| get(self, i) + get(rhs, i)).collect())
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl<F: Field> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: Self) -> Poly<F> {
        self + &(-rhs)
    }
}

impl<F: Field> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: Self) -> Poly<F> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coef = if c.is_one() && i > 0 {
                String::new()
            } else {
                c.to_string()
            };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        write!(f, "{}", terms.join(" + "))
    }
}

impl<F: fmt::Debug> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

/// An element of `F_p[x]/(f)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Residue<F> {
    value: Poly<F>,
    modulus: Poly<F>,
}

impl<F: Field> Residue<F> {
    pub fn new(value: &Poly<F>, modulus: &Poly<F>) -> Result<Self> {
        Ok(Self {
            value: value.rem(modulus)?,
            modulus: modulus.clone(),
        })
    }

    pub fn value(&self) -> &Poly<F> {
        &self.value
    }
}

impl<F: Field> MulGroup for Residue<F> {
    fn identity_like(&self) -> Self {
        Self {
            value: Poly::one().rem(&self.modulus).expect("modulus is nonzero"),
            modulus: self.modulus.clone(),
        }
    }

    fn op(&self, rhs: &Self) -> Self {
        Self {
            value: self
                .value
                .mul_mod(&rhs.value, &self.modulus)
                .expect("modulus is nonzero"),
            modulus: self.modulus.clone(),
        }
    }
}

/// `p^d - 1` when it fits in 64 bits.
pub fn extension_group_order(p: u64, d: usize) -> Result<u64> {
    u32::try_from(d)
        .ok()
        .and_then(|d| p.checked_pow(d))
        .map(|q| q - 1)
        .ok_or(Error::OrderOutOfRange)
}

/// Multiplicative order of `x`, an element whose order divides `p^d - 1`
/// (a companion matrix of an irreducible degree-`d` polynomial, a power of
/// one, or a nonzero residue modulo such a polynomial).
pub fn element_order<F: Field, G: MulGroup>(x: &G, d: usize) -> Result<u64> {
    let t = extension_group_order(F::MODULUS, d)?;
    group::element_order(x, t)
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    assert!(n > 0);
    let mut sign = 1;
    for (_, k) in factor::factorize(n) {
        if k > 1 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

/// Number of monic irreducible polynomials of degree `d` over `F_p`:
/// `(1/d) Σ_{r | d} μ(r) p^(d/r)`.
///
/// The shortcut `(p^d - 1)/d` is not this count: at `p = 2, d = 4` it gives
/// 15/4, while there are 3.
pub fn count_irreducibles(p: u64, d: usize) -> BigUint {
    assert!(d >= 1);
    let p = BigUint::from(p);
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for r in (1..=d).filter(|r| d.is_multiple_of(*r)) {
        let term = p.pow((d / r) as u32);
        match mobius(r as u64) {
            1 => pos += term,
            -1 => neg += term,
            _ => {}
        }
    }
    (pos - neg) / BigUint::from(d)
}

/// `p^d - 2`: monic degree-`d` polynomials excluding the two trivial ones.
pub fn count_monic_nontrivial(p: u64, d: usize) -> BigUint {
    BigUint::from(p).pow(d as u32) - BigUint::from(2u32)
}
