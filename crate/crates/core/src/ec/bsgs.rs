//! Group order by baby-step/giant-step inside the Hasse interval.
//!
//! Random points are drawn from a generator seeded by `p`, so the result for a
//! given `(curve, p)` never varies between calls. Each point contributes its
//! exact order to a running lcm `L`; once a single multiple of `L` remains in
//! the Hasse interval, that multiple is the group order.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::point::{Point, ShortCurve};
use super::{count_points_naive, hasse_interval, CurveModel};
use crate::arith::{factorize, isqrt, lcm};
use crate::{Error, Result};

/// BSGS is only used for `p >= BSGS_MIN_PRIME`; smaller primes are enumerated.
pub const BSGS_MIN_PRIME: u64 = 230;

/// Random points sampled before falling back to enumeration.
pub const BSGS_MAX_POINTS: usize = 40;

const SEED_SALT: u64 = 0x6b6f_626c_6974_7a00;

/// `|E(F_p)|` by BSGS, falling back to [`count_points_naive`] for `p < 230`
/// or when sampled point orders leave the order ambiguous.
pub fn count_points_bsgs(curve: &CurveModel, p: u64) -> Result<u64> {
    if curve.has_bad_reduction(p) {
        return Err(Error::BadReduction(p));
    }
    if p < BSGS_MIN_PRIME {
        return count_points_naive(curve, p);
    }
    let short = ShortCurve::from_model(curve, p);
    let (lo, hi) = hasse_interval(p);
    let mut rng = ChaCha8Rng::seed_from_u64(p ^ SEED_SALT);
    let mut l = 1u64;
    for _ in 0..BSGS_MAX_POINTS {
        let pt = short.random_point(&mut rng);
        let Some(m) = find_annihilator(&short, pt, lo, hi, l) else {
            break;
        };
        let ord = order_from_multiple(&short, pt, m);
        l = lcm(l, ord).ok_or(Error::Overflow("point order lcm"))?;
        if let Some(n) = unique_multiple(l, lo, hi) {
            return Ok(n);
        }
    }
    log::debug!("bsgs: order ambiguous for p = {p} (lcm {l}); enumerating");
    count_points_naive(curve, p)
}

fn unique_multiple(l: u64, lo: u64, hi: u64) -> Option<u64> {
    let first = lo.div_ceil(l) * l;
    (first <= hi && first + l > hi).then_some(first)
}

/// Some `m = base + k*step` in `[lo, hi]` with `m * pt = O`, where `step`
/// divides the group order.
fn find_annihilator(c: &ShortCurve, pt: Point, lo: u64, hi: u64, step: u64) -> Option<u64> {
    let base = lo.div_ceil(step) * step;
    if base > hi {
        return None;
    }
    let k_max = (hi - base) / step;
    let baby = isqrt(k_max) + 1;
    let s = c.mul(pt, step);

    // x-coordinate of j*S -> j, for 1 <= j <= baby.
    let mut table: HashMap<u64, u64> = HashMap::with_capacity(baby as usize);
    let mut js = s;
    for j in 1..=baby {
        if let Point::Affine(x, _) = js {
            table.entry(x).or_insert(j);
        }
        js = c.add(js, s);
    }
    let giant = c.mul(s, baby);
    let mut t = c.mul(pt, base);
    let mut i = 0u64;
    while i * baby <= k_max + baby {
        // t = (base + i*baby*step) * pt
        if t == Point::Infinity {
            let k = i * baby;
            if k <= k_max {
                return Some(base + k * step);
            }
        } else if let Point::Affine(x, _) = t {
            if let Some(&j) = table.get(&x) {
                // t == jS gives k = i*baby - j; t == -jS gives k = i*baby + j.
                let candidates = [(i * baby).checked_sub(j), Some(i * baby + j)];
                for k in candidates.into_iter().flatten().filter(|&k| k <= k_max) {
                    let m = base + k * step;
                    if c.mul(pt, m) == Point::Infinity {
                        return Some(m);
                    }
                }
            }
        }
        t = c.add(t, giant);
        i += 1;
    }
    None
}

/// Exact order of `pt`, given a multiple `m` of it.
fn order_from_multiple(c: &ShortCurve, pt: Point, m: u64) -> u64 {
    let mut ord = m;
    for &(q, _) in factorize(m).factors() {
        while ord.is_multiple_of(q) && c.mul(pt, ord / q) == Point::Infinity {
            ord /= q;
        }
    }
    ord
}
