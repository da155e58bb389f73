//! 64-bit factorization: trial division, then Pollard-rho (Brent) with a
//! deterministic Miller-Rabin certificate on every prime factor.

use std::sync::OnceLock;

use super::sieve::simple_primes_below;
use super::{gcd, is_prime, mulmod};

/// Trial division runs over all primes below this bound.
pub const TRIAL_DIVISION_BOUND: u64 = 100_000;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| simple_primes_below(TRIAL_DIVISION_BOUND))
}

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// Number of distinct prime factors.
    pub fn little_omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [(_, 1)])
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    /// Multiplies the factors back together.
    pub fn reassemble(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }
}

/// Complete factorization of `n >= 1`. `factorize(1)` has no factors.
pub fn factorize(n: u64) -> FactoredInteger {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        let mut large = Vec::new();
        split_into_primes(m, &mut large);
        large.sort_unstable();
        for p in large {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    FactoredInteger { n, factors }
}

fn split_into_primes(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    if let Some(r) = super::perfect_square_root(n) {
        split_into_primes(r, out);
        split_into_primes(r, out);
        return;
    }
    let d = pollard_brent(n);
    split_into_primes(d, out);
    split_into_primes(n / d, out);
}

/// Finds a nontrivial divisor of the odd composite `n` using Brent's
/// cycle detection with batched gcds. Retries with a new polynomial
/// constant until one succeeds.
pub fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    const BATCH: u64 = 128;
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
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
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // Batch overshot; step back one at a time.
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(factorize(12).factors(), &[(2, 2), (3, 1)]);
        assert!(factorize(1).factors().is_empty());
        assert_eq!(factorize(1024).factors(), &[(2, 10)]);
        assert_eq!(factorize(2147483647).factors(), &[(2147483647, 1)]);
    }

    #[test]
    fn semiprimes_beyond_trial_division() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(factorize(p * q).factors(), &[(q, 1), (p, 1)]);
        assert_eq!(factorize(p * p).factors(), &[(p, 2)]);
        let r = 100_003u64;
        assert_eq!(factorize(r * r * r).factors(), &[(r, 3)]);
    }

    #[test]
    fn large_composites_reassemble() {
        for n in [
            (1u64 << 63) - 25,
            9_223_372_036_854_775_783,
            600_851_475_143,
            4_611_686_014_132_420_609, // (2^31-1)^2
        ] {
            let f = factorize(n);
            assert_eq!(f.reassemble(), n);
            assert!(f.primes().all(is_prime));
        }
    }
}
