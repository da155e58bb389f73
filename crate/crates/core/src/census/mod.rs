//! Streaming census of `|E(F_p)|` over all primes `p <= x`.
//!
//! The census walks `p` in checkpoint segments `(k*I, (k+1)*I]`. Each
//! segment is cut into fixed-width sub-blocks aligned to absolute multiples
//! of [`SUB_BLOCK`], counted in parallel, and merged in ascending order, so
//! the final tallies (including the floating-point `H` sum) depend only on
//! the configuration and never on thread timing or on where a run was
//! interrupted.

mod checkpoint;
mod report;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use checkpoint::{load_checkpoint, save_checkpoint};
pub use checkpoint::CHECKPOINT_MAGIC;
pub use report::{
    greaves_comparison, plot_data, plot_data_from_json, CensusReport, DensityPrediction,
    DivisorCount, GreavesComparison, ObservedDensity, Predictions, PrefixTally,
    REPORT_SCHEMA_VERSION,
};

use crate::arith::{factorize, gcd, is_prime, SegmentedSieve};
use crate::ec::{reduce_and_count, CurveModel};
use crate::gl2::GaloisImageSpec;
use crate::sieve_theory::{check_conditions, weight_g_from_primes, SieveParams, DEFAULT_EPSILON};
use crate::{Error, Result};

/// Largest census bound accepted; keeps `|E(F_p)|` far below `2^63`.
pub const MAX_X: u64 = 1_000_000_000_000_000;

/// Largest divisor accepted as a `|A_d|` probe.
pub const MAX_DIVISOR_PROBE: u64 = 10_000;

/// Width of the parallel work unit.
pub const SUB_BLOCK: u64 = 1 << 15;

/// `P_r` counts are kept for `r = 1..=MAX_R`.
pub const MAX_R: usize = 16;

/// CSV header of the per-prime dump.
pub const DUMP_HEADER: &str = "p,ap,np,gcd_me,omega,big_omega";

/// Everything that determines a census run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub curve: CurveModel,
    pub image: GaloisImageSpec,
    pub x: u64,
    pub params: SieveParams,
    /// Primes `l` whose frequency `l | |E(F_p)|` is tallied.
    pub ell_probe_set: Vec<u64>,
    /// Squarefree `d` for which `|A_d|` is tallied.
    pub divisor_probes: Vec<u64>,
    pub checkpoint_interval: u64,
    /// Euler-product cutoff for the predicted constant.
    pub constant_cutoff: u64,
}

impl CensusConfig {
    /// Standard sieve parameters at `theta = 1/2`, probes `l in {2,3,5,7}` and
    /// small squarefree `d`, both restricted to values coprime to `M_E`.
    pub fn new(curve: CurveModel, image: GaloisImageSpec, x: u64) -> Result<Self> {
        let m_e = image.m_e();
        let params = SieveParams::standard(0.5, DEFAULT_EPSILON)?;
        Ok(CensusConfig {
            curve,
            x,
            params,
            ell_probe_set: [2, 3, 5, 7].into_iter().filter(|l| !m_e.is_multiple_of(*l)).collect(),
            divisor_probes: [1, 2, 3, 5, 6, 7, 10, 15, 30, 105]
                .into_iter()
                .filter(|&d| gcd(d, m_e) == 1)
                .collect(),
            checkpoint_interval: (x / 10).max(1),
            constant_cutoff: 1_000_000,
            image,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |s: String| Err(Error::InvalidConfig(s));
        if self.x < 100 {
            return invalid(format!("x = {} is below 100", self.x));
        }
        if self.x > MAX_X {
            return Err(Error::OutOfRange(format!(
                "x = {} exceeds the 64-bit safety cap {MAX_X}",
                self.x
            )));
        }
        if self.checkpoint_interval == 0 {
            return invalid("checkpoint interval must be positive".into());
        }
        let m_e = self.image.m_e();
        let largest = factorize(m_e).primes().last().unwrap_or(1);
        if self.constant_cutoff < 2 || self.constant_cutoff < largest {
            return Err(Error::OutOfRange(format!(
                "constant cutoff {} below 2 or below the largest prime of M_E = {m_e}",
                self.constant_cutoff
            )));
        }
        for &l in &self.ell_probe_set {
            if !is_prime(l) {
                return invalid(format!("probe {l} is not prime"));
            }
            if m_e.is_multiple_of(l) {
                return Err(Error::NotCoprime(l, m_e));
            }
        }
        for &d in &self.divisor_probes {
            if d == 0 || d > MAX_DIVISOR_PROBE {
                return Err(Error::OutOfRange(format!(
                    "divisor probe {d} not in [1, {MAX_DIVISOR_PROBE}]"
                )));
            }
            if !factorize(d).is_squarefree() {
                return Err(Error::NotSquarefree(d));
            }
            if gcd(d, m_e) != 1 {
                return Err(Error::NotCoprime(d, m_e));
            }
        }
        let violations = check_conditions(&self.params);
        if !violations.is_empty() {
            let names: Vec<&str> = violations.iter().map(|v| v.name.as_str()).collect();
            return invalid(format!("sieve parameters violate {}", names.join(", ")));
        }
        Ok(())
    }

    /// 64-bit FNV-1a of the canonical JSON form; ties checkpoints to configs.
    pub fn fingerprint(&self) -> u64 {
        let json = serde_json::to_string(self).expect("config serializes");
        json.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }

    pub fn log_level(&self) -> f64 {
        self.params.log_level(self.x as f64)
    }
}

/// Per-range tallies; merging is associative and, for the integer fields,
/// commutative.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tally {
    pub n_good: u64,
    pub n_in_a: u64,
    pub pi_twin: u64,
    pub pi_twin_unrestricted: u64,
    /// `omega_hist[k]` = #{a in A : Omega(a) = k}, with the last slot for `> MAX_R`.
    pub omega_hist: [u64; MAX_R + 2],
    pub divisor: Vec<u64>,
    pub ell: Vec<u64>,
    pub h: f64,
    pub s: u64,
    /// #{p : |E| prime and (|E| <= D^(1/2) or gcd(|E|, M_E) > 1)}
    pub ub1_extra: u64,
    pub prime_not_coprime: u64,
    pub sixteen_me_violations: u64,
    pub hasse_violations: u64,
    pub excluded: Vec<u64>,
}

impl Tally {
    pub fn empty(n_div: usize, n_ell: usize) -> Self {
        Tally {
            n_good: 0,
            n_in_a: 0,
            pi_twin: 0,
            pi_twin_unrestricted: 0,
            omega_hist: [0; MAX_R + 2],
            divisor: vec![0; n_div],
            ell: vec![0; n_ell],
            h: 0.0,
            s: 0,
            ub1_extra: 0,
            prime_not_coprime: 0,
            sixteen_me_violations: 0,
            hasse_violations: 0,
            excluded: Vec::new(),
        }
    }

    /// Appends `o`, which must cover a later range of primes.
    pub fn merge(&mut self, o: &Tally) {
        self.n_good += o.n_good;
        self.n_in_a += o.n_in_a;
        self.pi_twin += o.pi_twin;
        self.pi_twin_unrestricted += o.pi_twin_unrestricted;
        for (a, b) in self.omega_hist.iter_mut().zip(&o.omega_hist) {
            *a += b;
        }
        for (a, b) in self.divisor.iter_mut().zip(&o.divisor) {
            *a += b;
        }
        for (a, b) in self.ell.iter_mut().zip(&o.ell) {
            *a += b;
        }
        self.h += o.h;
        self.s += o.s;
        self.ub1_extra += o.ub1_extra;
        self.prime_not_coprime += o.prime_not_coprime;
        self.sixteen_me_violations += o.sixteen_me_violations;
        self.hasse_violations += o.hasse_violations;
        self.excluded.extend_from_slice(&o.excluded);
    }

    /// Cumulative `#{a in A : Omega(a) <= r}` for `r = 1..=MAX_R`.
    pub fn p_r_counts(&self) -> Vec<u64> {
        let mut acc = self.omega_hist[0];
        (1..=MAX_R)
            .map(|r| {
                acc += self.omega_hist[r];
                acc
            })
            .collect()
    }

    pub fn prefix(&self, x: u64) -> PrefixTally {
        PrefixTally {
            x,
            n_good_primes: self.n_good,
            n_in_a: self.n_in_a,
            pi_twin: self.pi_twin,
            empirical_s: self.s,
            ub1_correction: self.ub1_extra,
            empirical_h: self.h,
            ub1_holds: self.pi_twin <= self.s + self.ub1_extra,
        }
    }
}

/// Precomputed per-run constants shared by every block.
struct Kernel<'a> {
    config: &'a CensusConfig,
    m_e: u64,
    log_d: f64,
}

impl Kernel<'_> {
    fn process(&self, sieve: &SegmentedSieve, lo: u64, hi: u64, dump: bool) -> (Tally, String) {
        let cfg = self.config;
        let mut t = Tally::empty(cfg.divisor_probes.len(), cfg.ell_probe_set.len());
        let mut rows = String::new();
        let half_log_d = 0.5 * self.log_d;
        let u_log_d = cfg.params.u * self.log_d;
        sieve.for_each_prime(lo, hi, |p| {
            let rec = match reduce_and_count(&cfg.curve, p) {
                Ok(r) => r,
                Err(Error::BadReduction(_)) => {
                    t.excluded.push(p);
                    return;
                }
                Err(e) => panic!("point count failed at p = {p}: {e}"),
            };
            t.n_good += 1;
            if !(rec.satisfies_hasse() && rec.satisfies_sixteenth_bound()) {
                t.hasse_violations += 1;
            }
            let a = rec.np;
            for (slot, &l) in t.ell.iter_mut().zip(&cfg.ell_probe_set) {
                if a % l == 0 {
                    *slot += 1;
                }
            }
            let f = factorize(a);
            let g = gcd(a, self.m_e);
            let prime = f.is_prime();
            if prime {
                t.pi_twin_unrestricted += 1;
                let small = (a as f64).ln() <= half_log_d;
                if g > 1 {
                    t.prime_not_coprime += 1;
                    if p > 16 * self.m_e {
                        t.sixteen_me_violations += 1;
                    }
                }
                if small || g > 1 {
                    t.ub1_extra += 1;
                }
            }
            if dump {
                use std::fmt::Write as _;
                let _ = writeln!(
                    rows,
                    "{},{},{},{},{},{}",
                    p,
                    rec.ap,
                    a,
                    g,
                    f.little_omega(),
                    f.big_omega()
                );
            }
            if g != 1 {
                return;
            }
            // a is in A from here on.
            t.n_in_a += 1;
            if prime {
                t.pi_twin += 1;
            }
            let omega = f.big_omega() as usize;
            t.omega_hist[omega.min(MAX_R + 1)] += 1;
            for (slot, &d) in t.divisor.iter_mut().zip(&cfg.divisor_probes) {
                if a % d == 0 {
                    *slot += 1;
                }
            }
            // Sifted: no prime factor below D^(1/2); every factor of a lies in P.
            if f.primes().all(|q| (q as f64).ln() >= half_log_d) {
                t.s += 1;
            }
            t.h += weight_g_from_primes(f.primes(), &cfg.params, self.log_d, |q| {
                (q as f64).ln() < u_log_d
            });
        });
        (t, rows)
    }
}

/// Resumable census state: everything below `next` has been tallied.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CensusState {
    pub next: u64,
    pub tally: Tally,
    pub prefix: Vec<PrefixTally>,
}

/// A census in progress.
pub struct Census {
    config: CensusConfig,
    state: CensusState,
    sieve: SegmentedSieve,
}

impl Census {
    pub fn new(config: CensusConfig) -> Result<Self> {
        config.validate()?;
        let state = CensusState {
            next: 1,
            tally: Tally::empty(config.divisor_probes.len(), config.ell_probe_set.len()),
            prefix: Vec::new(),
        };
        let sieve = SegmentedSieve::new(config.x + 1);
        Ok(Census {
            config,
            state,
            sieve,
        })
    }

    /// Continues from the checkpoint at `path`; a missing or empty file
    /// starts a fresh census.
    pub fn resume(config: CensusConfig, path: &Path) -> Result<Self> {
        let mut census = Census::new(config)?;
        let fresh = match std::fs::metadata(path) {
            Ok(m) => m.len() == 0,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => true,
            Err(e) => return Err(e.into()),
        };
        if !fresh {
            let bytes = std::fs::read(path)?;
            census.state = load_checkpoint(&bytes, &census.config)?;
        }
        Ok(census)
    }

    pub fn config(&self) -> &CensusConfig {
        &self.config
    }

    /// Largest prime bound fully tallied so far.
    pub fn progress(&self) -> u64 {
        self.state.next - 1
    }

    pub fn is_done(&self) -> bool {
        self.state.next > self.config.x
    }

    /// Tallies the next checkpoint segment. Returns `false` once complete.
    pub fn step(&mut self, dump: Option<&mut dyn Write>) -> Result<bool> {
        if self.is_done() {
            return Ok(false);
        }
        let interval = self.config.checkpoint_interval;
        let lo = self.state.next;
        let seg_end = ((lo - 1) / interval + 1).saturating_mul(interval).min(self.config.x);
        let hi = seg_end + 1;

        let mut blocks = Vec::new();
        let mut start = lo;
        while start < hi {
            let end = ((start / SUB_BLOCK + 1) * SUB_BLOCK).min(hi);
            blocks.push((start, end));
            start = end;
        }
        let kernel = Kernel {
            config: &self.config,
            m_e: self.config.image.m_e(),
            log_d: self.config.log_level(),
        };
        let want_rows = dump.is_some();
        let sieve = &self.sieve;
        let results: Vec<(Tally, String)> = blocks
            .par_iter()
            .map(|&(a, b)| kernel.process(sieve, a, b, want_rows))
            .collect();
        let mut segment = Tally::empty(self.config.divisor_probes.len(), self.config.ell_probe_set.len());
        for (t, _) in &results {
            segment.merge(t);
        }
        if let Some(w) = dump {
            for (_, rows) in &results {
                w.write_all(rows.as_bytes())?;
            }
        }
        self.state.tally.merge(&segment);
        self.state.next = hi;
        self.state.prefix.push(self.state.tally.prefix(seg_end));
        log::debug!("census: tallied p <= {seg_end}");
        Ok(!self.is_done())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = save_checkpoint(&self.state, &self.config);
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, bytes)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Runs to completion (or until `stop_after` is passed), checkpointing
    /// after every segment when a path is given.
    pub fn run(
        &mut self,
        mut dump: Option<&mut dyn Write>,
        checkpoint: Option<&Path>,
        stop_after: Option<u64>,
    ) -> Result<()> {
        while !self.is_done() {
            self.step(dump.as_mut().map(|w| &mut **w as &mut dyn Write))?;
            if let Some(path) = checkpoint {
                self.save(path)?;
            }
            if stop_after.is_some_and(|s| self.progress() >= s) {
                break;
            }
        }
        Ok(())
    }

    /// Builds the report. Fails unless the census has covered every `p <= x`.
    pub fn finish(&self) -> Result<CensusReport> {
        if !self.is_done() {
            return Err(Error::InvalidConfig(format!(
                "census incomplete: tallied up to {} of {}",
                self.progress(),
                self.config.x
            )));
        }
        CensusReport::build(&self.config, &self.state)
    }
}

/// Runs a complete census in memory.
pub fn run_census(config: CensusConfig) -> Result<CensusReport> {
    let mut c = Census::new(config)?;
    c.run(None, None, None)?;
    c.finish()
}

/// Largest deviation `|sum_{z1 <= l < z2, l not | M_E} (w(l)/l) log l - log(z2/z1)|`
/// over dyadic endpoints `2 <= z1 < z2 <= D`, where `w(l)/l = |C(l)|/|G(l)|`.
pub fn omega1_sup(m_e: u64, level: f64) -> f64 {
    let mut ends = vec![2.0f64];
    while ends.last().unwrap() * 2.0 <= level {
        let next = ends.last().unwrap() * 2.0;
        ends.push(next);
    }
    if level > *ends.last().unwrap() {
        ends.push(level);
    }
    let top = level.floor() as u64 + 1;
    let primes = crate::arith::primes_in_range(2, top);
    let weight = |l: u64| {
        if m_e.is_multiple_of(l) {
            return 0.0;
        }
        let lf = l as f64;
        (lf * lf - 2.0) / ((lf - 1.0) * (lf * lf - 1.0)) * lf.ln()
    };
    // partial[i] = sum over primes < ends[i]
    let partial: Vec<f64> = ends
        .iter()
        .map(|&z| primes.iter().filter(|&&l| (l as f64) < z).map(|&l| weight(l)).sum())
        .collect();
    let mut sup = 0.0f64;
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            let dev = (partial[j] - partial[i] - (ends[j] / ends[i]).ln()).abs();
            sup = sup.max(dev);
        }
    }
    sup
}
