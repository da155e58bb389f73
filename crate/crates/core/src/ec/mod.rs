//! Elliptic curves over `Q` and their reductions modulo primes.

mod bsgs;
mod curve;
mod naive;
mod point;

pub use bsgs::{count_points_bsgs, BSGS_MAX_POINTS, BSGS_MIN_PRIME};
pub use curve::CurveModel;
pub use naive::count_points_naive;
pub use point::{ShortCurve, Point};

use serde::{Deserialize, Serialize};

use crate::arith::isqrt;
use crate::{Error, Result};

/// Below this bound `reduce_and_count` enumerates; at or above it uses BSGS.
pub const NAIVE_LIMIT: u64 = 10_000;

/// Frobenius data `(p, |E(F_p)|, a_p)` for one prime of good reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusRecord {
    pub p: u64,
    pub np: u64,
    pub ap: i64,
}

impl FrobeniusRecord {
    pub fn new(p: u64, np: u64) -> Self {
        FrobeniusRecord {
            p,
            np,
            ap: p as i64 + 1 - np as i64,
        }
    }

    /// `a_p^2 <= 4p`, checked in exact integer arithmetic.
    pub fn satisfies_hasse(&self) -> bool {
        (self.ap as i128) * (self.ap as i128) <= 4 * self.p as i128
    }

    /// `|E(F_p)| >= ceil(p / 16)`.
    pub fn satisfies_sixteenth_bound(&self) -> bool {
        self.np >= self.p.div_ceil(16)
    }
}

/// Integer endpoints of the Hasse interval `[p + 1 - 2 sqrt p, p + 1 + 2 sqrt p]`.
pub fn hasse_interval(p: u64) -> (u64, u64) {
    let w = isqrt(4 * p);
    (p + 1 - w, p + 1 + w)
}

/// Reduces `curve` modulo `p` and counts its points.
pub fn reduce_and_count(curve: &CurveModel, p: u64) -> Result<FrobeniusRecord> {
    if curve.has_bad_reduction(p) {
        return Err(Error::BadReduction(p));
    }
    let np = if p < NAIVE_LIMIT {
        count_points_naive(curve, p)?
    } else {
        count_points_bsgs(curve, p)?
    };
    Ok(FrobeniusRecord::new(p, np))
}
