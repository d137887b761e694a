//! 64-bit integer factorization: trial division up to 10⁶, then Pollard's rho
//! (Brent's cycle detection) with a deterministic Miller–Rabin primality test.
//! Used to factor `p^d - 1` for element-order computations.

const TRIAL_LIMIT: u64 = 1_000_000;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Deterministic for all `n < 2^64` with the first twelve prime bases.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Finds a nontrivial divisor of an odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1;
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // Batched product overshot; replay one step at a time.
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Prime factorization as `(prime, multiplicity)` pairs in ascending order.
/// `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "cannot factor zero");
    let mut primes = Vec::new();
    let mut q = 2u64;
    while q <= TRIAL_LIMIT && q * q <= n {
        while n.is_multiple_of(q) {
            primes.push(q);
            n /= q;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        split_into(n, &mut primes);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((last, k)) if *last == p => *k += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(f: &[(u64, u32)]) -> u64 {
        f.iter().map(|&(p, k)| p.pow(k)).product()
    }

    #[test]
    fn small_primes() {
        let sieve: Vec<u64> = (0..2000).filter(|&n| is_prime(n)).collect();
        let naive: Vec<u64> = (0..2000u64)
            .filter(|&n| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(sieve, naive);
    }

    #[test]
    fn order_of_gl8_field() {
        let n = 251u64.pow(8) - 1;
        let f = factorize(n);
        assert_eq!(
            f,
            vec![
                (2, 5),
                (3, 2),
                (5, 3),
                (7, 1),
                (17, 2),
                (109, 1),
                (1_984_563_001, 1)
            ]
        );
    }

    #[test]
    fn large_semiprimes_need_rho() {
        // Both factors exceed the trial-division limit.
        let (a, b) = (4_294_967_291u64, 4_294_967_279u64);
        assert_eq!(factorize(a * b), vec![(b, 1), (a, 1)]);
        let (c, d) = (1_000_003u64, 1_000_033u64);
        assert_eq!(factorize(c * d * 7), vec![(7, 1), (c, 1), (d, 1)]);
    }

    #[test]
    fn products_round_trip() {
        for n in (1..5000u64).chain([u64::MAX, u64::MAX - 58, 2u64.pow(63), 3u64.pow(40)]) {
            let f = factorize(n);
            assert_eq!(product(&f), n, "n = {n}");
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
    }
}
