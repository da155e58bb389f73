use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Long Weierstrass model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`
/// with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CurveCoefficients", into = "CurveCoefficients")]
pub struct CurveModel {
    coeffs: [i64; 5],
    disc: i128,
}

#[derive(Serialize, Deserialize)]
struct CurveCoefficients {
    a1: i64,
    a2: i64,
    a3: i64,
    a4: i64,
    a6: i64,
}

impl TryFrom<CurveCoefficients> for CurveModel {
    type Error = Error;
    fn try_from(c: CurveCoefficients) -> Result<Self> {
        CurveModel::new(c.a1, c.a2, c.a3, c.a4, c.a6)
    }
}

impl From<CurveModel> for CurveCoefficients {
    fn from(e: CurveModel) -> Self {
        let [a1, a2, a3, a4, a6] = e.coeffs;
        CurveCoefficients { a1, a2, a3, a4, a6 }
    }
}

impl CurveModel {
    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Result<Self> {
        let coeffs = [a1, a2, a3, a4, a6];
        let disc = discriminant(coeffs)?;
        if disc == 0 {
            return Err(Error::SingularCurve);
        }
        Ok(CurveModel { coeffs, disc })
    }

    /// `[a1, a2, a3, a4, a6]`.
    pub fn coefficients(&self) -> [i64; 5] {
        self.coeffs
    }

    pub fn discriminant(&self) -> i128 {
        self.disc
    }

    /// `p | disc`; the model discriminant stands in for the conductor.
    pub fn has_bad_reduction(&self, p: u64) -> bool {
        self.disc % p as i128 == 0
    }

    /// Coefficients reduced into `[0, p)`.
    pub fn reduced(&self, p: u64) -> [u64; 5] {
        self.coeffs.map(|a| a.rem_euclid(p as i64) as u64)
    }

    /// `(c4, c6)` invariants.
    pub fn c_invariants(&self) -> (i128, i128) {
        let (b2, b4, b6, _) = b_invariants(self.coeffs);
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        (c4, c6)
    }
}

fn b_invariants([a1, a2, a3, a4, a6]: [i64; 5]) -> (i128, i128, i128, i128) {
    let [a1, a2, a3, a4, a6] = [a1, a2, a3, a4, a6].map(|a| a as i128);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    (b2, b4, b6, b8)
}

fn discriminant(coeffs: [i64; 5]) -> Result<i128> {
    // Coefficients up to 2^20 keep every intermediate product well inside i128.
    if coeffs.iter().any(|a| a.unsigned_abs() > 1 << 20) {
        return Err(Error::Overflow("curve discriminant"));
    }
    let (b2, b4, b6, b8) = b_invariants(coeffs);
    Ok(-b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6)
}

impl FromStr for CurveModel {
    type Err = Error;

    /// Parses `"a1,a2,a3,a4,a6"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!(
                "curve needs five comma-separated integers, got {s:?}"
            )));
        }
        let mut c = [0i64; 5];
        for (slot, part) in c.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad curve coefficient {part:?}")))?;
        }
        CurveModel::new(c[0], c[1], c[2], c[3], c[4])
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = self.coeffs;
        write!(f, "{a1},{a2},{a3},{a4},{a6}")
    }
}
