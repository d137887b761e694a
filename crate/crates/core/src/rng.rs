//! Injected randomness.
//!
//! Every randomized operation takes a `&mut RandomSource`; nothing reads an
//! ambient generator. A seeded source replays the same stream, which is what
//! makes protocol transcripts reproducible in tests and in the CLI `--seed`
//! mode. Production use must go through [`RandomSource::cryptographic`].

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RngMode {
    /// Seeded ChaCha20 stream, replayable.
    DeterministicTest,
    /// ChaCha20 keyed from operating-system entropy.
    Cryptographic,
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha20Rng,
    mode: RngMode,
}

impl RandomSource {
    /// Deterministic stream keyed by SHA-256 of `seed`.
    pub fn from_seed(seed: &[u8]) -> Self {
        let key: [u8; 32] = Sha256::digest(seed).into();
        Self {
            rng: ChaCha20Rng::from_seed(key),
            mode: RngMode::DeterministicTest,
        }
    }

    pub fn cryptographic() -> Self {
        Self {
            rng: ChaCha20Rng::from_entropy(),
            mode: RngMode::Cryptographic,
        }
    }

    pub fn mode(&self) -> RngMode {
        self.mode
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw from `[0, bound)` by rejection. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty sampling range");
        // Largest multiple of `bound` representable in 2^64, minus one.
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.rng.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform draw from the inclusive range `[lo, hi]`.
    pub fn in_range(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    /// Uniform field element over `[0, p)`.
    pub fn element<F: Field>(&mut self) -> F {
        F::from_u64(self.below(F::MODULUS))
    }

    /// Uniform field element over `[1, p)`.
    pub fn nonzero<F: Field>(&mut self) -> F {
        F::from_u64(1 + self.below(F::MODULUS - 1))
    }

    /// Exponent drawn uniformly from `[1, p-1]`.
    pub fn exponent<F: Field>(&mut self) -> u64 {
        self.in_range(1, F::MODULUS - 1)
    }

    pub fn fill_bytes(&mut self, buf: &mut [u8]) {
        self.rng.fill_bytes(buf);
    }
}

/// `count` pairwise-distinct nonzero residues, uniformly chosen and ordered.
///
/// Partial Fisher–Yates over `1..p`, so `count = p - 1` yields a uniformly
/// random permutation.
pub fn sample_distinct_nonzero<F: Field>(rng: &mut RandomSource, count: usize) -> Result<Vec<F>> {
    let available = F::MODULUS - 1;
    if count as u64 > available {
        return Err(Error::ImpossibleRequest {
            requested: count,
            available,
        });
    }
    let mut pool: Vec<F> = (1..F::MODULUS).map(F::from_u64).collect();
    for i in 0..count {
        let j = i + rng.below((pool.len() - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(count);
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use std::collections::HashSet;

    type F = Fp<251>;

    #[test]
    fn seeded_streams_replay() {
        let mut a = RandomSource::from_seed(b"seed");
        let mut b = RandomSource::from_seed(b"seed");
        let xs: Vec<u64> = (0..32).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..32).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_eq!(a.mode(), RngMode::DeterministicTest);

        let mut c = RandomSource::from_seed(b"other");
        assert_ne!(xs[0], c.next_u64());
    }

    #[test]
    fn cryptographic_mode_reports_itself() {
        let r = RandomSource::cryptographic();
        assert_eq!(r.mode(), RngMode::Cryptographic);
    }

    #[test]
    fn exhaustion_gives_permutation() {
        let mut rng = RandomSource::from_seed(b"perm");
        let v: Vec<F> = sample_distinct_nonzero(&mut rng, 250).unwrap();
        let mut vals: Vec<u8> = v.iter().map(|x| x.value()).collect();
        vals.sort_unstable();
        assert_eq!(vals, (1..=250).collect::<Vec<u8>>());
    }

    #[test]
    fn eight_distinct_nonzero() {
        let mut rng = RandomSource::from_seed(b"eight");
        for _ in 0..100 {
            let v: Vec<F> = sample_distinct_nonzero(&mut rng, 8).unwrap();
            assert_eq!(v.len(), 8);
            assert!(v.iter().all(|x| x.value() != 0));
            assert_eq!(v.iter().collect::<HashSet<_>>().len(), 8);
        }
    }

    #[test]
    fn distinct_sampling_replays() {
        let a: Vec<F> = sample_distinct_nonzero(&mut RandomSource::from_seed(b"s"), 8).unwrap();
        let b: Vec<F> = sample_distinct_nonzero(&mut RandomSource::from_seed(b"s"), 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_many_is_rejected() {
        let mut rng = RandomSource::from_seed(b"x");
        let err = sample_distinct_nonzero::<F>(&mut rng, 251).unwrap_err();
        assert_eq!(
            err,
            Error::ImpossibleRequest {
                requested: 251,
                available: 250
            }
        );
        assert!(sample_distinct_nonzero::<Fp<2>>(&mut rng, 1).is_ok());
        assert!(sample_distinct_nonzero::<Fp<2>>(&mut rng, 2).is_err());
    }

    #[test]
    fn uniform_frequencies_within_five_sigma() {
        let mut rng = RandomSource::from_seed(b"uniform");
        let draws = 100_000u64;
        let mut counts = [0u64; 251];
        for _ in 0..draws {
            counts[rng.element::<F>().value() as usize] += 1;
        }
        let p = 1.0 / 251.0;
        let mean = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (v, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - mean).abs() <= 5.0 * sigma,
                "residue {v} drawn {c} times"
            );
        }

        let mut counts = [0u64; 251];
        for _ in 0..draws {
            counts[rng.nonzero::<F>().value() as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        let p = 1.0 / 250.0;
        let mean = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - mean).abs() <= 5.0 * sigma);
        }
    }

    #[test]
    fn below_covers_small_ranges() {
        let mut rng = RandomSource::from_seed(b"below");
        let mut seen = [false; 3];
        for _ in 0..200 {
            seen[rng.below(3) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(rng.below(1), 0);
        for _ in 0..100 {
            let e = rng.exponent::<F>();
            assert!((1..=250).contains(&e));
        }
    }
}
