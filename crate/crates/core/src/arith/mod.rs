//! Primes, factorization and the elementary arithmetic functions used by
//! every other module.

mod factor;
mod sieve;

pub use factor::{factorize, pollard_brent, FactoredInteger, TRIAL_DIVISION_BOUND};
pub use sieve::{
    count_primes_in_range, for_each_prime, primes_in_range, simple_primes_below, SegmentedSieve,
    SEGMENT_WIDTH,
};

use crate::quad::adaptive_simpson_rel;

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub(crate) fn perfect_square_root(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

// Deterministic for every n < 2^64.
const MR_WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic Miller-Rabin over the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &MR_WITNESSES {
        let a = w % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn big_omega(n: u64) -> u32 {
    factorize(n).big_omega()
}

pub fn little_omega(n: u64) -> u32 {
    factorize(n).little_omega()
}

/// `omega(a) + #{(p, nu) : p >= z, nu >= 2, p^nu | a}`.
pub fn omega_trunc(a: u64, z: f64) -> u32 {
    omega_trunc_factored(&factorize(a), z)
}

pub fn omega_trunc_factored(f: &FactoredInteger, z: f64) -> u32 {
    let extra: u32 = f
        .factors()
        .iter()
        .filter(|&&(p, _)| p as f64 >= z)
        .map(|&(_, e)| e - 1)
        .sum();
    f.little_omega() + extra
}

pub fn mobius(n: u64) -> i8 {
    let f = factorize(n);
    if !f.is_squarefree() {
        0
    } else if f.little_omega().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Squarefree divisors of `n` with their Moebius signs, ascending.
pub fn squarefree_divisors(n: u64) -> Vec<(u64, i8)> {
    let mut out = vec![(1u64, 1i8)];
    for p in factorize(n).primes() {
        let len = out.len();
        for i in 0..len {
            let (d, s) = out[i];
            out.push((d * p, -s));
        }
    }
    out.sort_unstable();
    out
}

const LI_REL_TOL: f64 = 1e-12;

/// `li2(x) = int_2^x dt / (log t)^2`, zero for `x <= 2`.
pub fn li2(x: f64) -> f64 {
    if x <= 2.0 {
        return 0.0;
    }
    adaptive_simpson_rel(|t| 1.0 / (t.ln() * t.ln()), 2.0, x, LI_REL_TOL)
}

/// Offset logarithmic integral `int_2^x dt / log t`, zero for `x <= 2`.
pub fn li(x: f64) -> f64 {
    if x <= 2.0 {
        return 0.0;
    }
    adaptive_simpson_rel(|t| 1.0 / t.ln(), 2.0, x, LI_REL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_functions() {
        assert_eq!((big_omega(12), little_omega(12)), (3, 2));
        assert_eq!((big_omega(1), little_omega(1)), (0, 0));
        assert_eq!((big_omega(1024), little_omega(1024)), (10, 1));
    }

    #[test]
    fn omega_trunc_cases() {
        assert_eq!(omega_trunc(12, 2.0), 3);
        assert_eq!(omega_trunc(12, 3.0), 2);
        for p in [2u64, 3, 101, 1_000_000_007] {
            for z in [2.0, 50.0, 1e12] {
                assert_eq!(omega_trunc(p, z), 1);
            }
        }
        // 2^3 * 5^2: omega 2, pairs (2,2),(2,3),(5,2)
        assert_eq!(omega_trunc(200, 2.0), 5);
        assert_eq!(omega_trunc(200, 3.0), 3);
        assert_eq!(omega_trunc(200, 6.0), 2);
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(2), -1);
        assert_eq!(mobius(4), 0);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(30), -1);
    }

    #[test]
    fn squarefree_divisor_signs() {
        assert_eq!(
            squarefree_divisors(12),
            vec![(1, 1), (2, -1), (3, -1), (6, 1)]
        );
        assert_eq!(squarefree_divisors(1), vec![(1, 1)]);
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), 4294967295);
    }

    #[test]
    fn primality_spot_checks() {
        assert!(!is_prime(0) && !is_prime(1));
        assert!(is_prime(2) && is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn li2_lower_limit() {
        assert_eq!(li2(2.0), 0.0);
        assert_eq!(li2(1.5), 0.0);
        assert!(li2(3.0) > 0.0);
    }
}
