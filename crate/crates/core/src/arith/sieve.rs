//! Segmented sieve of Eratosthenes.

use super::isqrt;

/// Width of one sieve segment, in integers.
pub const SEGMENT_WIDTH: u64 = 1 << 18;

/// All primes `< limit`, by a plain (unsegmented) sieve.
pub fn simple_primes_below(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `[lo, hi)` in ascending order.
///
/// Memory is `O(sqrt(hi) + SEGMENT_WIDTH)`: the base primes up to `sqrt(hi)`
/// plus one segment buffer.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime(lo, hi, |p| out.push(p));
    out
}

/// Streams the primes in `[lo, hi)` to `f` without materializing them.
pub fn for_each_prime<F: FnMut(u64)>(lo: u64, hi: u64, f: F) {
    if lo.max(2) >= hi {
        return;
    }
    SegmentedSieve::new(hi).for_each_prime(lo, hi, f);
}

/// Base primes up to `sqrt(limit)`, reusable across many windows below `limit`.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    limit: u64,
    base: Vec<u64>,
}

impl SegmentedSieve {
    /// Prepares to sieve windows inside `[0, limit)`.
    pub fn new(limit: u64) -> Self {
        let base = simple_primes_below(isqrt(limit.saturating_sub(1)) + 1);
        SegmentedSieve { limit, base }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_prime(lo, hi, |p| out.push(p));
        out
    }

    /// Streams the primes in `[lo, hi)`; `hi` must not exceed the limit.
    pub fn for_each_prime<F: FnMut(u64)>(&self, lo: u64, hi: u64, mut f: F) {
        assert!(hi <= self.limit, "window end {hi} beyond sieve limit {}", self.limit);
        let lo = lo.max(2);
        if lo >= hi {
            return;
        }
        let width = SEGMENT_WIDTH.min(hi - lo) as usize;
        let mut buf = vec![true; width];
        let mut start = lo;
        while start < hi {
            let end = start.saturating_add(SEGMENT_WIDTH).min(hi);
            let len = (end - start) as usize;
            buf[..len].fill(true);
            for &q in &self.base {
                let sq = q * q;
                if sq >= end {
                    break;
                }
                let first = if sq >= start {
                    sq
                } else {
                    start.div_ceil(q) * q
                };
                let mut k = first;
                while k < end {
                    buf[(k - start) as usize] = false;
                    k += q;
                }
            }
            for (i, &is_p) in buf[..len].iter().enumerate() {
                if is_p {
                    f(start + i as u64);
                }
            }
            start = end;
        }
    }
}

/// Number of primes in `[lo, hi)`.
pub fn count_primes_in_range(lo: u64, hi: u64) -> u64 {
    let mut n = 0;
    for_each_prime(lo, hi, |_| n += 1);
    n
}
