//! Truncated Euler products for the classical twin-prime constant and the
//! Koblitz constant `C_E^twin`, each with a certified multiplicative tail.
//!
//! Products are accumulated as compensated sums of `ln(1 - t)` over fixed
//! prime blocks; block sums merge in ascending order so results are
//! reproducible regardless of thread count.

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, primes_in_range};
use crate::gl2::{prob_coprime, GaloisImageSpec};
use crate::{Error, Rational, Result};

const BLOCK: usize = 4096;

/// A truncated Euler product with its tail bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    /// Product over primes up to `cutoff`.
    pub value: f64,
    /// Relative half-width: the full product lies in `value * [1 - tail_bound, 1 + tail_bound]`.
    pub tail_bound: f64,
    pub cutoff: u64,
    pub image_mode: String,
}

impl ConstantEstimate {
    pub fn interval(&self) -> (f64, f64) {
        (
            self.value * (1.0 - self.tail_bound),
            self.value * (1.0 + self.tail_bound),
        )
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `E(l) = 1 - (l^2 - l - 1) / ((l - 1)^3 (l + 1))`, the generic Euler factor.
pub fn euler_factor(l: u64) -> Rational {
    Rational::one() - euler_defect(l)
}

/// `1 - E(l)`.
pub fn euler_defect(l: u64) -> Rational {
    let l = l as i128;
    Rational::new(l * l - l - 1, (l - 1).pow(3) * (l + 1))
}

fn euler_defect_f64(l: u64) -> f64 {
    let l = l as f64;
    (l * l - l - 1.0) / ((l - 1.0).powi(3) * (l + 1.0))
}

/// `sum ln(1 - defect(l))` over primes `l` in `[lo, hi]` not dividing `skip`.
fn log_product<F>(lo: u64, hi: u64, skip: u64, defect: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if hi < lo {
        return 0.0;
    }
    let primes = primes_in_range(lo, hi + 1);
    let partials: Vec<CompensatedSum> = primes
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut s = CompensatedSum::default();
            for &l in chunk {
                if !skip.is_multiple_of(l) {
                    s.add((-defect(l)).ln_1p());
                }
            }
            s
        })
        .collect();
    let mut total = CompensatedSum::default();
    for s in partials {
        total.merge(s);
    }
    total.value()
}

/// `C_twin = 2 prod_{2 < l <= cutoff} (1 - 1/(l-1)^2)`.
///
/// Tail: for `l >= 3`, `-ln(1 - t) <= 2t` with `t = 1/(l-1)^2`, and
/// `sum_{n > y} 2/(n-1)^2 <= 2/(y-1)`, so the relative tail is at most
/// `exp(2/(cutoff-1)) - 1`.
pub fn twin_constant_classical(cutoff: u64) -> Result<ConstantEstimate> {
    if cutoff < 3 {
        return Err(Error::OutOfRange(format!("cutoff {cutoff} < 3")));
    }
    let log = log_product(3, cutoff, 1, |l| {
        let m = (l - 1) as f64;
        1.0 / (m * m)
    });
    Ok(ConstantEstimate {
        value: 2.0 * log.exp(),
        tail_bound: (2.0 / (cutoff as f64 - 1.0)).exp_m1(),
        cutoff,
        image_mode: "classical".into(),
    })
}

/// Relative tail of the Koblitz product beyond `cutoff >= 2`.
///
/// For `l >= 3`, `1 - E(l) <= 2/l^2 <= 2/9`, hence
/// `-ln E(l) <= (9/7)(2/l^2)`; with `sum_{n > y} 1/n^2 <= 1/y` the omitted
/// factors shrink the product by at most `exp(18/(7y))`.
pub fn koblitz_tail_bound(cutoff: u64) -> f64 {
    (18.0 / (7.0 * cutoff as f64)).exp_m1()
}

/// `C_E^twin` truncated at `cutoff`:
/// `prob_coprime / prod_{l | M_E}(1 - 1/l) * prod_{l not | M_E, l <= cutoff} E(l)`.
pub fn koblitz_constant(image: &GaloisImageSpec, cutoff: u64) -> Result<ConstantEstimate> {
    let m = image.m_e();
    let largest = factorize(m).primes().last().unwrap_or(1);
    if cutoff < 2 || cutoff < largest {
        return Err(Error::OutOfRange(format!(
            "cutoff {cutoff} below 2 or below the largest prime of M_E = {m}"
        )));
    }
    let correction = correction_factor(image)?;
    let log = log_product(2, cutoff, m, euler_defect_f64);
    Ok(ConstantEstimate {
        value: correction * log.exp(),
        tail_bound: koblitz_tail_bound(cutoff),
        cutoff,
        image_mode: image.label(),
    })
}

/// `(1 - |Omega(M_E)|/|G(M_E)|) / prod_{l | M_E} (1 - 1/l)` as an exact rational.
pub fn correction_factor_exact(image: &GaloisImageSpec) -> Result<Rational> {
    let mut acc = prob_coprime(image)?;
    for l in factorize(image.m_e()).primes() {
        acc /= Rational::new(l as i128 - 1, l as i128);
    }
    Ok(acc)
}

fn correction_factor(image: &GaloisImageSpec) -> Result<f64> {
    correction_factor_exact(image)?
        .to_f64()
        .ok_or(Error::Overflow("correction factor"))
}

/// The same truncated product in exact rational arithmetic, for small
/// cutoffs where it fits in `i128`.
pub fn koblitz_partial_exact(image: &GaloisImageSpec, cutoff: u64) -> Result<Rational> {
    let m = image.m_e();
    let mut acc = correction_factor_exact(image)?;
    for l in primes_in_range(2, cutoff + 1) {
        if !m.is_multiple_of(l) {
            acc = num_traits::CheckedMul::checked_mul(&acc, &euler_factor(l))
                .ok_or(Error::Overflow("exact Euler product"))?;
        }
    }
    Ok(acc)
}
