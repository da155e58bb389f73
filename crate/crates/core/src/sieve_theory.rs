//! Analytic side of the weighted sieve: Greaves weights, the functions
//! `alpha`, `beta`, `J`, the exponent `r(theta)`, and the lower/upper
//! constants they produce.

use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::quad::adaptive_simpson;
use crate::{Error, Result};

/// Lower limit for `V` in the Greaves admissibility conditions.
pub const V0: f64 = 0.074368;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper-bound sieve function at 2: `F(2) = e^gamma`.
pub fn selberg_f2() -> f64 {
    EULER_GAMMA.exp()
}

/// Truncated value of `2 J (1 - theta)` the lower bound is stated with.
pub const LOWER_TRUNCATED: f64 = 1.32303;

/// Rounded coefficient of `1/(1 - theta)` in the lower bound.
pub const LOWER_FLOOR_COEFF: f64 = 1.323;

/// Default U and V.
pub const DEFAULT_U: f64 = 5.0 / 8.0;
pub const DEFAULT_V: f64 = 0.25;
pub const DEFAULT_EPSILON: f64 = 1e-3;

const QUAD_TOL: f64 = 1e-12;

/// Sieve parameters `(theta, epsilon, xi, U, V, r)`. The level `D = x^xi`
/// is supplied separately once `x` is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SieveParams {
    pub theta: f64,
    pub epsilon: f64,
    pub xi: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub r: u32,
}

impl SieveParams {
    /// `r = r(theta)`, `xi = 2(1 - theta)(1 - eps)/5`, `U = 5/8`, `V = 1/4`.
    pub fn standard(theta: f64, epsilon: f64) -> Result<Self> {
        let r = r_of_theta(theta)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::OutOfRange(format!("epsilon {epsilon} not in (0, 1)")));
        }
        Ok(SieveParams {
            theta,
            epsilon,
            xi: 2.0 * (1.0 - theta) * (1.0 - epsilon) / 5.0,
            u: DEFAULT_U,
            v: DEFAULT_V,
            r,
        })
    }

    /// `log D` for `D = x^xi`.
    pub fn log_level(&self, x: f64) -> f64 {
        self.xi * x.ln()
    }

    pub fn check_conditions(&self) -> Vec<Violation> {
        check_conditions(self)
    }
}

/// A failed admissibility inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub detail: String,
}

/// Every inequality the parameters must satisfy; empty means admissible.
pub fn check_conditions(p: &SieveParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut check = |ok: bool, name: &str, detail: String| {
        if !ok {
            out.push(Violation {
                name: name.into(),
                detail,
            });
        }
    };
    check(
        (0.5..1.0).contains(&p.theta),
        "theta_range",
        format!("need 1/2 <= theta < 1, got {}", p.theta),
    );
    check(p.epsilon > 0.0, "epsilon_positive", format!("got {}", p.epsilon));
    check(p.xi > 0.0, "xi_positive", format!("got {}", p.xi));
    check(p.v >= V0, "V_lower", format!("need V >= {V0}, got {}", p.v));
    check(p.v <= 0.25, "V_upper", format!("need V <= 1/4, got {}", p.v));
    check(p.u >= 0.5, "U_lower", format!("need U >= 1/2, got {}", p.u));
    check(p.u < 1.0, "U_upper", format!("need U < 1, got {}", p.u));
    check(
        p.u + 3.0 * p.v >= 1.0,
        "U_plus_3V",
        format!("need U + 3V >= 1, got {}", p.u + 3.0 * p.v),
    );
    let cover = p.xi * (p.r as f64 * p.u + p.v);
    check(
        cover > 1.0,
        "level_covers_sequence",
        format!("need xi (rU + V) > 1, got {cover}"),
    );
    check(
        p.v >= 1.0 / 6.0,
        "V_alpha_beta_domain",
        format!("alpha/beta need V >= 1/6, got {}", p.v),
    );
    out
}

/// `r(theta) = floor((18 + 2 theta) / (5 (1 - theta))) + 1`.
///
/// The quotient is snapped to an integer when it lies within `1e-9` of one,
/// so `theta = 11/21` (quotient exactly 8) gives 9 despite rounding in `theta`.
pub fn r_of_theta(theta: f64) -> Result<u32> {
    if !(0.5..1.0).contains(&theta) {
        return Err(Error::OutOfRange(format!("theta {theta} not in [1/2, 1)")));
    }
    let q = (18.0 + 2.0 * theta) / (5.0 * (1.0 - theta));
    let nearest = q.round();
    let floor = if (q - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        q.floor()
    };
    if floor >= u32::MAX as f64 {
        return Err(Error::OutOfRange(format!("r(theta) overflows for theta {theta}")));
    }
    Ok(floor as u32 + 1)
}

/// Greaves' logarithmic weight: `(log p / log D - V) / (U - V)` on
/// `[D^V, D^U)`, zero elsewhere.
pub fn weight_w(p: u64, params: &SieveParams, log_d: f64) -> f64 {
    let s = (p as f64).ln() / log_d;
    if s >= params.v && s < params.u {
        (s - params.v) / (params.u - params.v)
    } else {
        0.0
    }
}

/// `{1 - sum_{q | n, q in P} (1 - W(q))}^+` over the distinct primes of `n`.
pub fn weight_g<F>(n: u64, params: &SieveParams, log_d: f64, in_sieve: F) -> f64
where
    F: Fn(u64) -> bool,
{
    weight_g_from_primes(factorize(n).primes(), params, log_d, in_sieve)
}

pub fn weight_g_from_primes<I, F>(primes: I, params: &SieveParams, log_d: f64, in_sieve: F) -> f64
where
    I: IntoIterator<Item = u64>,
    F: Fn(u64) -> bool,
{
    let deficit: f64 = primes
        .into_iter()
        .filter(|&q| in_sieve(q))
        .map(|q| 1.0 - weight_w(q, params, log_d))
        .sum();
    (1.0 - deficit).max(0.0)
}

fn check_alpha_beta_domain(v: f64) -> Result<()> {
    if !(1.0 / 6.0..=0.25).contains(&v) {
        return Err(Error::OutOfRange(format!("V = {v} not in [1/6, 1/4]")));
    }
    Ok(())
}

fn kernel(u: f64) -> f64 {
    (u - 3.0).ln() / (u - 2.0)
}

/// Integrand of `alpha` at `u` (exposed for quadrature cross-checks).
pub fn alpha_integrand(u: f64, v: f64) -> f64 {
    ((2.0 / u) * (2.0 - u * v).ln() + ((1.0 - 1.0 / u) / (1.0 - v)).ln()) * kernel(u)
}

/// Integrand of `beta` at `u`.
pub fn beta_integrand(u: f64, v: f64) -> f64 {
    ((2.0 - u * v).ln() + ((1.0 - 1.0 / u) / (1.0 - v)).ln()) * kernel(u)
}

/// `alpha(V) = log((1 - V)/(3/4)) - int_4^{1/V} alpha_integrand du`.
pub fn alpha(v: f64) -> Result<f64> {
    check_alpha_beta_domain(v)?;
    let lead = ((1.0 - v) / 0.75).ln();
    Ok(lead - adaptive_simpson(|u| alpha_integrand(u, v), 4.0, 1.0 / v, QUAD_TOL))
}

/// `beta(V) = log((1 - V)/(3V)) - int_4^{1/V} beta_integrand du`.
pub fn beta(v: f64) -> Result<f64> {
    check_alpha_beta_domain(v)?;
    let lead = ((1.0 - v) / (3.0 * v)).ln();
    Ok(lead - adaptive_simpson(|u| beta_integrand(u, v), 4.0, 1.0 / v, QUAD_TOL))
}

/// Bracketed numerator of `J`:
/// `alpha(V) - V beta(V) - V log 3 - U log U - (1-U) log(1-U) - log(4/3)`.
pub fn j_numerator(u: f64, v: f64) -> Result<f64> {
    Ok(alpha(v)? - v * beta(v)? - v * 3f64.ln() - u * u.ln() - (1.0 - u) * (1.0 - u).ln()
        - (4.0f64 / 3.0).ln())
}

/// `J(xi, U, V) = j_numerator(U, V) / (xi (U - V))`.
pub fn j_function(xi: f64, u: f64, v: f64) -> Result<f64> {
    if xi <= 0.0 {
        return Err(Error::OutOfRange(format!("xi = {xi} must be positive")));
    }
    if !(u > v && u < 1.0) {
        return Err(Error::OutOfRange(format!("need V < U < 1, got U = {u}, V = {v}")));
    }
    Ok(j_numerator(u, v)? / (xi * (u - v)))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.5..1.0).contains(&theta) {
        return Err(Error::OutOfRange(format!("theta {theta} not in [1/2, 1)")));
    }
    Ok(())
}

/// `2 J(2(1 - theta)/5, 5/8, 1/4)`.
pub fn lower_bound_constant(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(2.0 * j_function(2.0 * (1.0 - theta) / 5.0, DEFAULT_U, DEFAULT_V)?)
}

/// `1.323 / (1 - theta)`.
pub fn lower_floor(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(LOWER_FLOOR_COEFF / (1.0 - theta))
}

/// `5 / (1 - theta) + epsilon`.
pub fn upper_bound_constant(theta: f64, epsilon: f64) -> Result<f64> {
    check_theta(theta)?;
    if epsilon <= 0.0 {
        return Err(Error::OutOfRange(format!("epsilon {epsilon} must be positive")));
    }
    Ok(5.0 / (1.0 - theta) + epsilon)
}

/// Main-term coefficient of the Selberg upper bound at level `D = x^xi`:
/// `F(2) e^{-gamma} * 2 / xi`, i.e. `2/xi`.
pub fn selberg_main_coefficient(xi: f64) -> f64 {
    selberg_f2() * (-EULER_GAMMA).exp() * 2.0 / xi
}

/// Everything the `bounds` subcommand reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub theta: f64,
    pub epsilon: f64,
    pub r: u32,
    pub xi: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub lower_constant: f64,
    /// `1.323 / (1 - theta)`, the rounded published floor.
    #[serde(rename = "paper_floor")]
    pub lower_floor: f64,
    /// `lower_constant (1 - theta)` fell below the truncated 1.32303.
    pub below_truncated_value: bool,
    pub upper_constant: f64,
    pub conditions: Vec<Violation>,
}

pub fn bounds_summary(theta: f64, epsilon: f64) -> Result<BoundsSummary> {
    let params = SieveParams::standard(theta, epsilon)?;
    let lower = lower_bound_constant(theta)?;
    Ok(BoundsSummary {
        theta,
        epsilon,
        r: params.r,
        xi: params.xi,
        u: params.u,
        v: params.v,
        lower_constant: lower,
        lower_floor: lower_floor(theta)?,
        below_truncated_value: lower * (1.0 - theta) < LOWER_TRUNCATED,
        upper_constant: upper_bound_constant(theta, epsilon)?,
        conditions: check_conditions(&params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> SieveParams {
        SieveParams::standard(0.5, DEFAULT_EPSILON).unwrap()
    }

    #[test]
    fn r_values() {
        assert_eq!(r_of_theta(0.5), Ok(8));
        assert_eq!(r_of_theta(11.0 / 21.0), Ok(9));
        assert_eq!(r_of_theta(0.52), Ok(8));
        assert!(r_of_theta(0.49).is_err());
        assert!(r_of_theta(1.0).is_err());
    }

    #[test]
    fn weight_w_shape() {
        let p = standard();
        let log_d = 1000f64.ln();
        // D = 1000: support [1000^(1/4), 1000^(5/8)) = [5.62.., 74.98..)
        assert_eq!(weight_w(5, &p, log_d), 0.0);
        assert_eq!(weight_w(79, &p, log_d), 0.0);
        let w = weight_w(7, &p, log_d);
        assert!(w > 0.0 && w < 1.0);
        // Midpoint of the log-scale support maps to 1/2.
        let log_d = 16.0 * 2f64.ln(); // D = 2^16, support [2^4, 2^10), midpoint 2^7
        assert!((weight_w(128, &p, log_d) - 0.5).abs() < 1e-12);
        assert!(weight_w(16, &p, log_d).abs() < 1e-12);
    }

    #[test]
    fn weight_g_cases() {
        let p = standard();
        let log_d = 1e6f64.ln();
        let all = |_| true;
        assert_eq!(weight_g(1, &p, log_d, all), 1.0);
        assert_eq!(weight_g(2, &p, log_d, all), 0.0);
        // W = 3/4 at log q / log D = V + (3/4)(U - V) = 0.53125
        let log_d = 2f64.ln() / 0.53125 * 32.0; // q = 2^32 lands on W = 3/4
        let w = weight_w(1 << 32, &p, log_d);
        assert!((w - 0.75).abs() < 1e-12);
        let g = weight_g_from_primes([1u64 << 32, 1u64 << 32], &p, log_d, all);
        assert!((g - 0.5).abs() < 1e-12);
        // Primes outside P are ignored.
        assert_eq!(weight_g(6, &p, 1e6f64.ln(), |q| q != 2 && q != 3), 1.0);
    }

    #[test]
    fn alpha_beta_at_quarter() {
        assert!(alpha(0.25).unwrap().abs() < 1e-12);
        assert!(beta(0.25).unwrap().abs() < 1e-12);
        assert_eq!(alpha_integrand(4.0, 0.2), 0.0);
        assert_eq!(beta_integrand(4.0, 0.2), 0.0);
        assert!(alpha(0.1).is_err());
        assert!(beta(0.3).is_err());
    }

    #[test]
    fn j_scaling_and_value() {
        let j1 = j_function(0.2, 0.625, 0.25).unwrap();
        let j2 = j_function(0.4, 0.625, 0.25).unwrap();
        assert!((j2 - j1 / 2.0).abs() < 1e-14);
        assert!((j1 - 1.32304).abs() < 5e-4);
        assert!(j_numerator(0.625, 0.25).unwrap() > 0.0);
    }

    #[test]
    fn theorem_constants() {
        assert!((lower_bound_constant(0.5).unwrap() - 2.64608).abs() < 1e-3);
        assert!((lower_floor(0.5).unwrap() - 2.646).abs() < 1e-12);
        assert!(lower_bound_constant(11.0 / 21.0).unwrap() >= 2.778);
        assert!((lower_floor(11.0 / 21.0).unwrap() - 2.7783).abs() < 1e-12);
        assert!((upper_bound_constant(0.5, 1e-9).unwrap() - 10.0).abs() <= 1e-9 + 1e-12);
        assert!((selberg_main_coefficient(0.2) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn admissibility() {
        assert!(check_conditions(&standard()).is_empty());
        let mut p = standard();
        p.v = 0.05;
        assert!(check_conditions(&p).iter().any(|v| v.name == "V_lower"));
        let mut p = standard();
        p.u = 0.4;
        assert!(check_conditions(&p).iter().any(|v| v.name == "U_lower"));
        let mut p = standard();
        p.r = 1;
        assert!(check_conditions(&p)
            .iter()
            .any(|v| v.name == "level_covers_sequence"));
    }

    #[test]
    fn bounds_summary_at_half() {
        let s = bounds_summary(0.5, 1e-3).unwrap();
        assert_eq!(s.r, 8);
        assert!(!s.below_truncated_value);
        assert!(s.conditions.is_empty());
        assert!((s.upper_constant - 10.001).abs() < 1e-12);
    }
}
