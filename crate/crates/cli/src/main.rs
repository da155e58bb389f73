//! `ectwin`: command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on computation errors.

mod config_file;

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ectwin::census::{plot_data, plot_data_from_json, Census, DUMP_HEADER};
use ectwin::ec::{count_points_bsgs, count_points_naive, BSGS_MIN_PRIME};
use ectwin::gl2::{
    count_c, count_c_brute, density_c, density_c_prime, density_c_prime_squared, gl2_order,
    gl2_order_brute, parse_generators, prob_coprime, prob_coprime_inclusion_exclusion,
    subgroup_closure, BRUTE_FORCE_CAP,
};
use ectwin::koblitz::{koblitz_constant, twin_constant_classical};
use ectwin::sieve_theory::{
    alpha, beta, bounds_summary, lower_bound_constant, r_of_theta, SieveParams,
    DEFAULT_EPSILON,
};
use ectwin::{arith, CensusConfig, CurveModel, Error, GaloisImageSpec, Rational};

#[derive(Parser, Debug)]
#[command(name = "ectwin", version, about = "Almost-prime orders of elliptic curves mod p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Truncated Euler product for the Koblitz (or classical twin-prime) constant.
    #[command(args_override_self = true)]
    Constant(ConstantArgs),
    /// Census of |E(F_p)| over primes p <= x.
    #[command(args_override_self = true)]
    Census(CensusArgs),
    /// Sieve parameters and the lower/upper theorem constants for theta.
    #[command(args_override_self = true)]
    Bounds(BoundsArgs),
    /// Counts inside GL2(Z/nZ).
    #[command(args_override_self = true)]
    Gl2(Gl2Args),
    /// Fast self-checks of every module.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Plot-ready CSV from a census report.
    #[command(name = "plot-data", args_override_self = true)]
    PlotData(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Output {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct ImageArgs {
    /// Serre modulus M_E.
    #[arg(long = "me", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    me: u64,
    /// `full` or `gens:<file>` with one "a,b;c,d" matrix per line.
    #[arg(long, default_value = "full")]
    image: String,
}

impl ImageArgs {
    fn resolve(&self) -> Result<GaloisImageSpec, Failure> {
        if self.image == "full" {
            return Ok(GaloisImageSpec::full(self.me)?);
        }
        let Some(path) = self.image.strip_prefix("gens:") else {
            return Err(Failure::Usage(format!(
                "--image must be `full` or `gens:<file>`, got {:?}",
                self.image
            )));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read generators {path}: {e}")))?;
        let gens = parse_generators(&text, self.me)?;
        Ok(GaloisImageSpec::from_generators(self.me, gens)?)
    }
}

#[derive(Args, Debug)]
struct ConstantArgs {
    #[command(flatten)]
    image: ImageArgs,
    #[arg(long, default_value_t = 1_000_000)]
    cutoff: u64,
    /// The classical twin-prime constant instead.
    #[arg(long)]
    classical: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Weierstrass coefficients a1,a2,a3,a4,a6.
    #[arg(long, default_value = "0,0,1,-1,0")]
    curve: CurveModel,
    #[command(flatten)]
    image: ImageArgs,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long = "eps", default_value_t = DEFAULT_EPSILON)]
    eps: f64,
    /// Census bound.
    #[arg(long)]
    x: u64,
    /// Euler-product cutoff for the predicted constant.
    #[arg(long, default_value_t = 1_000_000)]
    cutoff: u64,
    /// Primes p between checkpoints (default x/10).
    #[arg(long)]
    checkpoint_interval: Option<u64>,
    /// Checkpoint file; resumed from when present.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Stop once all primes up to this bound are tallied.
    #[arg(long)]
    stop_after: Option<u64>,
    /// Comma-separated primes l for density probes.
    #[arg(long, value_delimiter = ',')]
    probe_ell: Option<Vec<u64>>,
    /// Comma-separated squarefree d for |A_d| probes.
    #[arg(long, value_delimiter = ',')]
    probe_d: Option<Vec<u64>>,
    /// Per-prime CSV dump.
    #[arg(long)]
    dump_primes: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long = "eps", default_value_t = DEFAULT_EPSILON)]
    eps: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Gl2Args {
    /// |C(n)|.
    #[arg(long = "count-C")]
    count_c: Option<u64>,
    /// |GL2(Z/nZ)|.
    #[arg(long)]
    order: Option<u64>,
    /// |C(n)| / |GL2(Z/nZ)| as an exact rational.
    #[arg(long)]
    density: Option<u64>,
    /// |Omega(M_E)| and 1 - |Omega|/|G| for the image.
    #[arg(long)]
    omega: bool,
    /// Size of the subgroup generated by the image generators.
    #[arg(long)]
    closure: bool,
    #[command(flatten)]
    image: ImageArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Curve for the point-counting cross-check.
    #[arg(long, default_value = "0,0,1,-1,0")]
    curve: CurveModel,
    /// Upper end of the point-counting cross-check.
    #[arg(long, default_value_t = 2000)]
    max_p: u64,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// Census report in JSON.
    report: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.into())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn rational_json(r: Rational) -> serde_json::Value {
    json!({ "exact": format!("{}/{}", r.numer(), r.denom()), "value": *r.numer() as f64 / *r.denom() as f64 })
}

fn run_constant(a: ConstantArgs) -> Result<(), Failure> {
    let est = if a.classical {
        twin_constant_classical(a.cutoff)?
    } else {
        koblitz_constant(&a.image.resolve()?, a.cutoff)?
    };
    let (lo, hi) = est.interval();
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "value": est.value,
            "tail_bound": est.tail_bound,
            "tail_bound_basis": "derived bound on the omitted Euler factors",
            "interval": [lo, hi],
            "cutoff": est.cutoff,
            "image_mode": est.image_mode,
        })),
        Format::Csv => format!(
            "value,tail_bound,lower,upper,cutoff,image_mode\n{},{},{},{},{},{}\n",
            est.value, est.tail_bound, lo, hi, est.cutoff, est.image_mode
        ),
    };
    emit(&a.output.out, &text)
}

fn open_dump(path: &Path, append: bool) -> Result<BufWriter<File>, Failure> {
    let file = if append {
        OpenOptions::new().append(true).create(true).open(path)?
    } else {
        File::create(path)?
    };
    let mut w = BufWriter::new(file);
    if !append {
        writeln!(w, "{DUMP_HEADER}")?;
    }
    Ok(w)
}

fn run_census(a: CensusArgs) -> Result<(), Failure> {
    let image = a.image.resolve()?;
    let mut config = CensusConfig::new(a.curve, image, a.x)?;
    config.params = SieveParams::standard(a.theta, a.eps)?;
    config.constant_cutoff = a.cutoff;
    if let Some(i) = a.checkpoint_interval {
        config.checkpoint_interval = i;
    }
    if let Some(l) = a.probe_ell {
        config.ell_probe_set = l;
    }
    if let Some(d) = a.probe_d {
        config.divisor_probes = d;
    }
    let mut census = match &a.checkpoint {
        Some(path) => Census::resume(config, path)?,
        None => Census::new(config)?,
    };
    let mut dump = match &a.dump_primes {
        Some(path) => Some(open_dump(path, census.progress() > 0)?),
        None => None,
    };
    census.run(
        dump.as_mut().map(|w| w as &mut dyn Write),
        a.checkpoint.as_deref(),
        a.stop_after,
    )?;
    if let Some(mut w) = dump {
        w.flush()?;
    }
    if !census.is_done() {
        log::info!("stopped after p <= {}", census.progress());
        eprintln!(
            "census paused at p <= {} of {}; rerun with the same --checkpoint to resume",
            census.progress(),
            census.config().x
        );
        return Ok(());
    }
    let report = census.finish()?;
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json(),
        Format::Csv => plot_data(&report),
    };
    emit(&a.output.out, &text)
}

fn run_bounds(a: BoundsArgs) -> Result<(), Failure> {
    let s = bounds_summary(a.theta, a.eps)?;
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&s),
        Format::Csv => format!(
            "theta,epsilon,r,xi,U,V,lower_constant,paper_floor,upper_constant,violations\n{},{},{},{},{},{},{},{},{},{}\n",
            s.theta,
            s.epsilon,
            s.r,
            s.xi,
            s.u,
            s.v,
            s.lower_constant,
            s.lower_floor,
            s.upper_constant,
            s.conditions.len()
        ),
    };
    emit(&a.output.out, &text)
}

fn run_gl2(a: Gl2Args) -> Result<(), Failure> {
    let mut fields = serde_json::Map::new();
    if let Some(n) = a.count_c {
        fields.insert("count_C".into(), json!(count_c(n)?));
    }
    if let Some(n) = a.order {
        fields.insert("order".into(), json!(gl2_order(n)?));
    }
    if let Some(n) = a.density {
        let d = match density_c(n) {
            Ok(d) => d,
            Err(Error::OutOfRange(_)) => Rational::new(
                count_c_brute(n, BRUTE_FORCE_CAP)? as i128,
                gl2_order_brute(n, BRUTE_FORCE_CAP)? as i128,
            ),
            Err(e) => return Err(e.into()),
        };
        fields.insert("density".into(), rational_json(d));
    }
    if a.omega || a.closure {
        let image = a.image.resolve()?;
        if a.omega {
            let c = image.counts()?;
            fields.insert("omega".into(), json!(c.omega));
            fields.insert("image_order".into(), json!(c.order));
            fields.insert("prob_coprime".into(), rational_json(prob_coprime(&image)?));
        }
        if a.closure {
            let size = match image.mode() {
                ectwin::ImageMode::Full => gl2_order(image.m_e())?,
                ectwin::ImageMode::Generators(g) => subgroup_closure(g)?.len() as u64,
            };
            fields.insert("closure_size".into(), json!(size));
        }
    }
    if fields.is_empty() {
        return Err(Failure::Usage(
            "gl2 needs one of --count-C, --order, --density, --omega, --closure".into(),
        ));
    }
    let text = match a.output.format {
        Some(Format::Json) => to_json(&fields),
        Some(Format::Csv) => {
            let keys: Vec<&str> = fields.keys().map(String::as_str).collect();
            let vals: Vec<String> = fields.values().map(plain_value).collect();
            format!("{}\n{}\n", keys.join(","), vals.join(","))
        }
        None => fields.values().map(|v| plain_value(v) + "\n").collect(),
    };
    emit(&a.output.out, &text)
}

fn plain_value(v: &serde_json::Value) -> String {
    match v.get("exact") {
        Some(serde_json::Value::String(s)) => s.clone(),
        _ => v.to_string(),
    }
}

fn check(name: &str, ok: bool, failures: &mut usize) {
    println!("{} {name}", if ok { "PASS" } else { "FAIL" });
    if !ok {
        *failures += 1;
    }
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let mut failures = 0;
    for theta in [0.5, 11.0 / 21.0, 0.6] {
        let c = lower_bound_constant(theta)? * (1.0 - theta);
        check(&format!("lower constant at theta={theta:.4}: {c:.6}"), (c - 1.32304).abs() <= 5e-4, &mut failures);
    }
    check(
        "alpha(1/4) and beta(1/4) vanish",
        alpha(0.25)?.abs() <= 1e-12 && beta(0.25)?.abs() <= 1e-12,
        &mut failures,
    );
    check("r(1/2) = 8", r_of_theta(0.5)? == 8, &mut failures);
    let primes = arith::primes_in_range(2, 14);
    let dens_ok = primes.iter().all(|&l| {
        Rational::new(count_c_brute(l, BRUTE_FORCE_CAP).unwrap_or(0) as i128, gl2_order(l).unwrap_or(1) as i128)
            == density_c_prime(l)
    }) && [2u64, 3].iter().all(|&l| {
        Rational::new(
            count_c_brute(l * l, BRUTE_FORCE_CAP).unwrap_or(0) as i128,
            gl2_order(l * l).unwrap_or(1) as i128,
        ) == density_c_prime_squared(l)
    });
    check("GL2 densities match closed forms", dens_ok, &mut failures);
    let mut ie_ok = true;
    for m in (1..=30u64).filter(|&m| arith::factorize(m).is_squarefree()) {
        ie_ok &= prob_coprime(&GaloisImageSpec::full(m)?)? == prob_coprime_inclusion_exclusion(m)?;
    }
    check("inclusion-exclusion for squarefree m <= 30", ie_ok, &mut failures);
    let mut pc_ok = true;
    for p in arith::primes_in_range(BSGS_MIN_PRIME, a.max_p + 1) {
        if a.curve.has_bad_reduction(p) {
            continue;
        }
        pc_ok &= count_points_bsgs(&a.curve, p)? == count_points_naive(&a.curve, p)?;
    }
    check(&format!("BSGS matches naive count up to {}", a.max_p), pc_ok, &mut failures);
    let twin = twin_constant_classical(100_000)?;
    let (lo, hi) = twin.interval();
    check(
        &format!("classical twin constant {:.8}", twin.value),
        lo <= 1.3203236317 && 1.3203236316 <= hi,
        &mut failures,
    );
    if failures > 0 {
        return Err(Failure::Compute(Error::InvalidConfig(format!("{failures} self-check(s) failed"))));
    }
    Ok(())
}

fn run_plot(a: PlotArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.report)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", a.report.display())))?;
    emit(&a.out, &plot_data_from_json(&text)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match config_file::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("usage error"));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Constant(a) => run_constant(a),
        Command::Census(a) => run_census(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Gl2(a) => run_gl2(a),
        Command::Verify(a) => run_verify(a),
        Command::PlotData(a) => run_plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
