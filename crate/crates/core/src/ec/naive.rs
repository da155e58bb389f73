use super::CurveModel;
use crate::arith::{mulmod, powmod};
use crate::{Error, Result};

// Above this, per-x Legendre symbols replace the square-count table.
const TABLE_LIMIT: u64 = 1 << 24;

/// Exhaustive point count of the reduced long Weierstrass equation,
/// point at infinity included.
pub fn count_points_naive(curve: &CurveModel, p: u64) -> Result<u64> {
    if curve.has_bad_reduction(p) {
        return Err(Error::BadReduction(p));
    }
    let [a1, a2, a3, a4, a6] = curve.reduced(p);
    if p <= 3 {
        return Ok(1 + count_pairs(p, [a1, a2, a3, a4, a6]));
    }
    // Odd characteristic: y^2 + h y = g has 1 + (disc / p) roots, disc = h^2 + 4g.
    let disc_at = |x: u64| {
        let x2 = mulmod(x, x, p);
        let g = (mulmod(x2, x, p) + mulmod(a2, x2, p) + mulmod(a4, x, p) + a6) % p;
        let h = (mulmod(a1, x, p) + a3) % p;
        (mulmod(h, h, p) + mulmod(4, g, p)) % p
    };
    let mut total = 1u64;
    if p < TABLE_LIMIT {
        let mut roots = vec![0u8; p as usize];
        for y in 0..p {
            roots[mulmod(y, y, p) as usize] += 1;
        }
        for x in 0..p {
            total += roots[disc_at(x) as usize] as u64;
        }
    } else {
        for x in 0..p {
            let d = disc_at(x);
            total += if d == 0 {
                1
            } else if powmod(d, (p - 1) / 2, p) == 1 {
                2
            } else {
                0
            };
        }
    }
    Ok(total)
}

fn count_pairs(p: u64, [a1, a2, a3, a4, a6]: [u64; 5]) -> u64 {
    let mut n = 0;
    for x in 0..p {
        for y in 0..p {
            let lhs = (y * y + a1 * x * y + a3 * y) % p;
            let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p;
            if lhs == rhs {
                n += 1;
            }
        }
    }
    n
}
