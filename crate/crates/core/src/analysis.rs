//! Cardinality and hardness figures for `GL(d, F_p)` and its commutative
//! subgroup, plus a toy-scale oracle for the symmetric decomposition problem
//! `y = z^m · x · z^n`.
//!
//! Arbitrary-precision integers appear only here; the protocol never needs
//! them.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::commuting::CommutingContext;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::poly::{self, Poly};
use crate::rng::RandomSource;

/// An exact count together with its decimal logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct Cardinality {
    pub exact: BigUint,
    pub log10: f64,
}

impl Cardinality {
    pub fn new(exact: BigUint) -> Self {
        let log10 = log10_big(&exact);
        Self { exact, log10 }
    }

    pub fn log2(&self) -> f64 {
        self.log10 / std::f64::consts::LOG10_2
    }
}

/// `log10(n)`, accurate for values far beyond `f64` range; `-inf` for zero.
pub fn log10_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_u64().expect("at most 64 bits") as f64;
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// `|GL(d, F_p)| = Π_{i=0}^{d-1} (p^d - p^i)`.
pub fn order_gl(d: usize, p: u64) -> Cardinality {
    let p = BigUint::from(p);
    let pd = p.pow(d as u32);
    let exact = (0..d).fold(BigUint::one(), |acc, i| acc * (&pd - p.pow(i as u32)));
    Cardinality::new(exact)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbientCounts {
    /// `p^(d²)`: every `d × d` matrix.
    pub all: Cardinality,
    /// `p^(d² - d)`: the nilpotent ones.
    pub nilpotent: Cardinality,
}

pub fn count_ambient(d: usize, p: u64) -> AmbientCounts {
    let p = BigUint::from(p);
    AmbientCounts {
        all: Cardinality::new(p.pow((d * d) as u32)),
        nilpotent: Cardinality::new(p.pow((d * d - d) as u32)),
    }
}

/// Two counts of the private diagonal search space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupOrders {
    /// `Π_{i=0}^{d-1} (p - 2 - i)`, the published figure (249·…·242 at d=8).
    pub published: Cardinality,
    /// `Π_{i=0}^{d-1} (p - 1 - i)`: ordered tuples of distinct nonzero
    /// eigenvalues, i.e. the number of distinct diagonal specs.
    pub distinct_nonzero: Cardinality,
}

fn falling_product(top: u64, d: usize) -> BigUint {
    (0..d as u64).fold(BigUint::one(), |acc, i| {
        acc * BigUint::from(top.saturating_sub(i))
    })
}

pub fn order_commutative_subgroup(d: usize, p: u64) -> SubgroupOrders {
    SubgroupOrders {
        published: Cardinality::new(falling_product(p.saturating_sub(2), d)),
        distinct_nonzero: Cardinality::new(falling_product(p.saturating_sub(1), d)),
    }
}

/// `1 - Π_{i=1}^{d} (1 - p^{-i})`: probability a uniform matrix is singular.
pub fn singular_probability_closed_form(d: usize, p: u64) -> f64 {
    let p = p as f64;
    1.0 - (1..=d as i32).map(|i| 1.0 - p.powi(-i)).product::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularEstimate {
    pub trials: u64,
    pub singular: u64,
    pub monte_carlo: f64,
    pub closed_form: f64,
}

/// Monte-Carlo estimate of the singular fraction of `d × d` matrices over `F`.
pub fn singular_probability<F: Field>(
    d: usize,
    trials: u64,
    rng: &mut RandomSource,
) -> SingularEstimate {
    assert!(trials >= 1);
    let singular = (0..trials)
        .filter(|_| !Matrix::<F>::random(rng, d).is_invertible())
        .count() as u64;
    SingularEstimate {
        trials,
        singular,
        monte_carlo: singular as f64 / trials as f64,
        closed_form: singular_probability_closed_form(d, F::MODULUS),
    }
}

/// Random irreducible polynomial, its companion matrix, and that matrix's
/// cyclic-subgroup order where `p^d - 1` fits in 64 bits.
#[derive(Debug, Clone)]
pub struct CompanionStudy<F> {
    pub poly: Poly<F>,
    pub trials: u32,
    pub companion: Matrix<F>,
    pub order: Option<u64>,
    pub group_order: Option<u64>,
}

impl<F> CompanionStudy<F> {
    pub fn is_primitive(&self) -> Option<bool> {
        Some(self.order? == self.group_order?)
    }
}

pub fn companion_study<F: Field>(rng: &mut RandomSource, d: usize) -> Result<CompanionStudy<F>> {
    let (poly, trials) = Poly::<F>::random_irreducible_counted(rng, d)?;
    let companion = Matrix::companion(&poly)?;
    let group_order = poly::extension_group_order(F::MODULUS, d).ok();
    let order = match group_order {
        Some(_) => Some(poly::element_order::<F, _>(&companion, d)?),
        None => None,
    };
    Ok(CompanionStudy {
        poly,
        trials,
        companion,
        order,
        group_order,
    })
}

/// `find z ∈ S with y = z^m · x · z^n`, where `S` is the commutative subgroup
/// described by `subgroup`. The exponents are absent in the blind variant.
#[derive(Debug, Clone)]
pub struct GsdpInstance<F> {
    pub subgroup: CommutingContext<F>,
    pub x: Matrix<F>,
    pub y: Matrix<F>,
    pub exponents: Option<(u64, u64)>,
}

impl<F: Field> GsdpInstance<F> {
    /// Builds a solvable instance and returns it with its witness `z`.
    /// Exponents are drawn from `[1, max_exp]`.
    pub fn generate(rng: &mut RandomSource, d: usize, max_exp: u64) -> (Self, Matrix<F>) {
        let subgroup = CommutingContext::random(rng, d);
        let z = subgroup.sample_subgroup_element(rng);
        let x = Matrix::random_invertible(rng, d);
        let m = rng.in_range(1, max_exp);
        let n = rng.in_range(1, max_exp);
        let y = &(&z.pow(m) * &x) * &z.pow(n);
        (
            Self {
                subgroup,
                x,
                y,
                exponents: Some((m, n)),
            },
            z,
        )
    }

    /// Whether `z ∈ S` and `z^m · x · z^n = y`.
    pub fn satisfies(&self, z: &Matrix<F>, m: u64, n: u64) -> bool {
        self.subgroup.contains(z) && &(&z.pow(m) * &self.x) * &z.pow(n) == self.y
    }
}

/// Checks a candidate against an instance that carries its exponents.
pub fn gsdp_verify<F: Field>(inst: &GsdpInstance<F>, z: &Matrix<F>) -> bool {
    match inst.exponents {
        Some((m, n)) => inst.satisfies(z, m, n),
        None => false,
    }
}

/// A solution `(z, m, n)` found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<F> {
    pub z: Matrix<F>,
    pub m: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceReport<F> {
    pub witness: Option<Witness<F>>,
    /// Relation checks performed.
    pub checks: u64,
    /// `|S| · max_exp²`: the size of the search space.
    pub space: u64,
}

const MAX_BRUTE_P: u64 = 7;
const MAX_BRUTE_EXP: u64 = 64;

/// Exhaustive search over every distinct-nonzero diagonal conjugated by the
/// instance basis and all `m, n ∈ [1, max_exp]`, with `x` known and the
/// exponents treated as unknown. Candidates are tried in lexicographic order
/// of `(λ_1, λ_2, m, n)`, so the first hit is the smallest witness.
///
/// Refuses anything above `d = 2`, `p ≤ 7`, `max_exp ≤ 64`.
pub fn bgsdp_bruteforce<F: Field>(
    inst: &GsdpInstance<F>,
    max_exp: u64,
) -> Result<BruteForceReport<F>> {
    if inst.subgroup.dim() != 2 {
        return Err(Error::CostGuard("only d = 2 is searchable"));
    }
    if F::MODULUS > MAX_BRUTE_P {
        return Err(Error::CostGuard("only p ≤ 7 is searchable"));
    }
    if max_exp == 0 || max_exp > MAX_BRUTE_EXP {
        return Err(Error::CostGuard("exponent bound must be in [1, 64]"));
    }
    let nonzero: Vec<F> = (1..F::MODULUS).map(F::from_u64).collect();
    let pairs: Vec<[F; 2]> = nonzero
        .iter()
        .flat_map(|&a| {
            nonzero
                .iter()
                .filter(move |&&b| b != a)
                .map(move |&b| [a, b])
        })
        .collect();
    let space = pairs.len() as u64 * max_exp * max_exp;
    let mut checks = 0;
    for lambdas in &pairs {
        let powers: Vec<Matrix<F>> = (1..=max_exp)
            .map(|e| {
                let vals = [lambdas[0].pow(e), lambdas[1].pow(e)];
                inst.subgroup.conjugate_values(&vals).expect("d = 2")
            })
            .collect();
        for m in 1..=max_exp {
            let left = &powers[m as usize - 1] * &inst.x;
            for n in 1..=max_exp {
                checks += 1;
                if &left * &powers[n as usize - 1] == inst.y {
                    let z = inst.subgroup.conjugate_values(lambdas).expect("d = 2");
                    return Ok(BruteForceReport {
                        witness: Some(Witness { z, m, n }),
                        checks,
                        space,
                    });
                }
            }
        }
    }
    Ok(BruteForceReport {
        witness: None,
        checks,
        space,
    })
}
