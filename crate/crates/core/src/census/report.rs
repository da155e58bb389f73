//! The census report and everything derived from it after the run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{omega1_sup, CensusConfig, CensusState, MAX_DIVISOR_PROBE};
use crate::arith::{factorize, gcd, li, li2};
use crate::ec::CurveModel;
use crate::gl2::{density_c, density_c_prime, prob_coprime};
use crate::koblitz::{koblitz_constant, ConstantEstimate};
use crate::sieve_theory::{j_function, selberg_main_coefficient, SieveParams};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Tallies of all primes up to one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrefixTally {
    pub x: u64,
    pub n_good_primes: u64,
    #[serde(rename = "n_in_A")]
    pub n_in_a: u64,
    pub pi_twin: u64,
    #[serde(rename = "empirical_S")]
    pub empirical_s: u64,
    pub ub1_correction: u64,
    #[serde(rename = "empirical_H")]
    pub empirical_h: f64,
    /// `pi_twin <= empirical_S + ub1_correction`.
    pub ub1_holds: bool,
}

/// `#{good p : l | |E(F_p)|} / n_good_primes`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedDensity {
    pub count: u64,
    pub total: u64,
    pub value: f64,
}

/// Closed-form density of `l | |E(F_p)|` with a 4-sigma binomial band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPrediction {
    pub predicted: f64,
    /// Exact value as `"num/den"`.
    pub predicted_exact: String,
    /// `4 sqrt(q (1 - q) / n)`; a heuristic band, not a theorem.
    pub tolerance_4sigma: f64,
    pub within_tolerance: bool,
}

/// `|A_d|` against `(|C(d)|/|G(d)|) * prob_coprime * li(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorCount {
    pub d: u64,
    pub observed: u64,
    pub predicted: f64,
    pub residual: f64,
}

/// Empirical weighted sum `H` against its main term. Asymptotic only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreavesComparison {
    #[serde(rename = "empirical_H")]
    pub empirical_h: f64,
    pub main_term: f64,
    pub ratio: f64,
}

/// Predicted values at `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    pub koblitz_constant: ConstantEstimate,
    /// The tail bound is derived here, not quoted.
    pub tail_bound_basis: String,
    /// `C * x / (log x)^2`.
    pub pi_twin_x_over_log2: f64,
    /// `C * li2(x)`.
    pub pi_twin_li2: f64,
    /// `2 J(xi, U, V) * C * x / (log x)^2`.
    pub greaves_main_term: f64,
    /// `(2 / xi) * C * x / (log x)^2`.
    pub selberg_upper_main_term: f64,
    pub densities: BTreeMap<u64, DensityPrediction>,
    pub prob_coprime: f64,
    pub li: f64,
    pub li2: f64,
}

/// Complete census output. Field names are the JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub schema_version: u32,
    pub curve: CurveModel,
    pub m_e: u64,
    pub image_mode: String,
    pub x: u64,
    pub params: SieveParams,
    /// `log D` with `D = x^xi`.
    pub log_level: f64,
    pub n_good_primes: u64,
    #[serde(rename = "n_in_A")]
    pub n_in_a: u64,
    /// `#{p : |E(F_p)| prime, gcd(|E(F_p)|, M_E) = 1}`.
    pub pi_twin: u64,
    /// `#{p : |E(F_p)| prime}` without the gcd condition.
    pub pi_twin_unrestricted: u64,
    /// Entry `r - 1` is `#{a in A : Omega(a) <= r}`.
    pub p_r_counts: Vec<u64>,
    pub divisor_counts: BTreeMap<u64, u64>,
    #[serde(rename = "empirical_H")]
    pub empirical_h: f64,
    #[serde(rename = "empirical_S")]
    pub empirical_s: u64,
    pub ub1_correction: u64,
    pub ub1_holds: bool,
    pub density_observed: BTreeMap<u64, ObservedDensity>,
    pub predictions: Predictions,
    pub greaves: GreavesComparison,
    pub divisor_residuals: BTreeMap<u64, DivisorCount>,
    /// Largest dyadic deviation of the `w(l) log l / l` sums up to `D`.
    pub omega1_sup: f64,
    pub n_prime_not_coprime: u64,
    /// Every `p` with `|E(F_p)|` prime and not coprime to `M_E` has `p <= 16 M_E`.
    pub sixteen_me_bound_holds: bool,
    pub hasse_violations: u64,
    /// Primes dividing the model discriminant.
    pub excluded_primes: Vec<u64>,
    pub checkpoints: Vec<PrefixTally>,
    pub notes: Vec<String>,
}

fn to_f64(r: crate::Rational, what: &'static str) -> Result<f64> {
    r.to_f64().ok_or(Error::Overflow(what))
}

/// `2 J(xi, U, V) * C * x / (log x)^2` and its ratio to `empirical_h`.
pub fn greaves_comparison(
    config: &CensusConfig,
    empirical_h: f64,
    constant: f64,
) -> Result<GreavesComparison> {
    let p = &config.params;
    let x = config.x as f64;
    let main_term = 2.0 * j_function(p.xi, p.u, p.v)? * constant * x / x.ln().powi(2);
    Ok(GreavesComparison {
        empirical_h,
        main_term,
        ratio: empirical_h / main_term,
    })
}

impl CensusReport {
    pub(crate) fn build(config: &CensusConfig, state: &CensusState) -> Result<Self> {
        let t = &state.tally;
        let x = config.x as f64;
        let log2x = x.ln().powi(2);
        let m_e = config.image.m_e();
        let constant = koblitz_constant(&config.image, config.constant_cutoff)?;
        let c = constant.value;
        let q_coprime = to_f64(prob_coprime(&config.image)?, "prob_coprime")?;
        let li_x = li(x);
        let li2_x = li2(x);

        let mut density_observed = BTreeMap::new();
        let mut densities = BTreeMap::new();
        for (&l, &count) in config.ell_probe_set.iter().zip(&t.ell) {
            let value = count as f64 / t.n_good as f64;
            density_observed.insert(
                l,
                ObservedDensity {
                    count,
                    total: t.n_good,
                    value,
                },
            );
            let exact = density_c_prime(l);
            let q = to_f64(exact, "density")?;
            let tol = 4.0 * (q * (1.0 - q) / t.n_good as f64).sqrt();
            densities.insert(
                l,
                DensityPrediction {
                    predicted: q,
                    predicted_exact: format!("{}/{}", exact.numer(), exact.denom()),
                    tolerance_4sigma: tol,
                    within_tolerance: (value - q).abs() <= tol,
                },
            );
        }

        let mut divisor_counts = BTreeMap::new();
        let mut divisor_residuals = BTreeMap::new();
        for (&d, &observed) in config.divisor_probes.iter().zip(&t.divisor) {
            divisor_counts.insert(d, observed);
            let predicted = to_f64(density_c(d)?, "density")? * q_coprime * li_x;
            divisor_residuals.insert(
                d,
                DivisorCount {
                    d,
                    observed,
                    predicted,
                    residual: observed as f64 - predicted,
                },
            );
        }

        let predictions = Predictions {
            tail_bound_basis: "derived bound exp(18/(7 cutoff)) - 1 on the omitted Euler factors"
                .into(),
            pi_twin_x_over_log2: c * x / log2x,
            pi_twin_li2: c * li2_x,
            greaves_main_term: 0.0,
            selberg_upper_main_term: selberg_main_coefficient(config.params.xi) * c * x / log2x,
            densities,
            prob_coprime: q_coprime,
            li: li_x,
            li2: li2_x,
            koblitz_constant: constant,
        };
        let greaves = greaves_comparison(config, t.h, c)?;
        let predictions = Predictions {
            greaves_main_term: greaves.main_term,
            ..predictions
        };

        let log_level = config.log_level();
        Ok(CensusReport {
            schema_version: REPORT_SCHEMA_VERSION,
            curve: config.curve,
            m_e,
            image_mode: config.image.label(),
            x: config.x,
            params: config.params,
            log_level,
            n_good_primes: t.n_good,
            n_in_a: t.n_in_a,
            pi_twin: t.pi_twin,
            pi_twin_unrestricted: t.pi_twin_unrestricted,
            p_r_counts: t.p_r_counts(),
            divisor_counts,
            empirical_h: t.h,
            empirical_s: t.s,
            ub1_correction: t.ub1_extra,
            ub1_holds: t.pi_twin <= t.s + t.ub1_extra,
            density_observed,
            predictions,
            greaves,
            divisor_residuals,
            omega1_sup: omega1_sup(m_e, log_level.exp()),
            n_prime_not_coprime: t.prime_not_coprime,
            sixteen_me_bound_holds: t.sixteen_me_violations == 0,
            hasse_violations: t.hasse_violations,
            excluded_primes: t.excluded.clone(),
            checkpoints: state.prefix.clone(),
            notes: vec![
                "bad reduction is decided by p | disc of the given model".into(),
                "greaves ratio compares main terms only; the error term is asymptotic".into(),
                "density tolerance is a 4-sigma binomial heuristic".into(),
                "no claim is made that x exceeds the ineffective threshold x0(E)".into(),
            ],
        })
    }

    /// `|A_d|`, its prediction and residual for a probed `d`.
    pub fn divisor_count(&self, d: u64) -> Result<DivisorCount> {
        if d == 0 || d > MAX_DIVISOR_PROBE {
            return Err(Error::OutOfRange(format!("divisor {d} not in [1, {MAX_DIVISOR_PROBE}]")));
        }
        if !factorize(d).is_squarefree() {
            return Err(Error::NotSquarefree(d));
        }
        if gcd(d, self.m_e) != 1 {
            return Err(Error::NotCoprime(d, self.m_e));
        }
        self.divisor_residuals.get(&d).copied().ok_or(Error::NotProbed(d))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// CSV `x,pi_twin,prediction,ratio` with `prediction = C * li2(x_i)`.
pub fn plot_data(report: &CensusReport) -> String {
    plot_rows(&report.checkpoints, report.predictions.koblitz_constant.value)
}

/// [`plot_data`] from report JSON; only the checkpoint series and the
/// constant are needed.
pub fn plot_data_from_json(json: &str) -> Result<String> {
    let v: serde_json::Value = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let series = v.get("checkpoints").ok_or(Error::MissingCheckpoints)?;
    let checkpoints: Vec<PrefixTally> =
        serde_json::from_value(series.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let constant = if checkpoints.is_empty() {
        0.0
    } else {
        v.pointer("/predictions/koblitz_constant/value")
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| Error::Parse("missing predictions.koblitz_constant.value".into()))?
    };
    Ok(plot_rows(&checkpoints, constant))
}

fn plot_rows(checkpoints: &[PrefixTally], constant: f64) -> String {
    let mut out = String::from("x,pi_twin,prediction,ratio\n");
    for cp in checkpoints {
        let prediction = constant * li2(cp.x as f64);
        let ratio = if prediction > 0.0 {
            (cp.pi_twin as f64 / prediction).to_string()
        } else {
            String::new()
        };
        let _ = writeln!(out, "{},{},{},{}", cp.x, cp.pi_twin, prediction, ratio);
    }
    out
}
