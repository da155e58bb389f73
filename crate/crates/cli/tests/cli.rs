use std::path::Path;
use std::process::{Command, Output};

fn ectwin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ectwin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn bounds_at_one_half() {
    let o = ectwin(&["bounds", "--theta", "0.5"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["r"], 8);
    let upper = v["upper_constant"].as_f64().unwrap();
    assert!((upper - 10.0).abs() <= 1e-3 + 1e-12);
    assert!((v["paper_floor"].as_f64().unwrap() - 2.646).abs() < 1e-9);
    assert_eq!(v["conditions"], serde_json::json!([]));
    for key in ["xi", "U", "V", "lower_constant"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn gl2_count_of_two() {
    let o = ectwin(&["gl2", "--count-C", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "4");
    let o = ectwin(&["gl2", "--density", "4", "--format", "json"]);
    assert_eq!(json(&o)["density"]["exact"], "5/12");
}

#[test]
fn census_at_one_thousand() {
    let o = ectwin(&["census", "--curve", "0,0,1,-1,0", "--x", "1000", "--me", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["n_good_primes"], 167);
    assert_eq!(v["excluded_primes"], serde_json::json!([37]));
    let again = ectwin(&["census", "--curve", "0,0,1,-1,0", "--x", "1000", "--me", "1"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["census", "--x", "abc"],
        vec!["bounds", "--theta"],
        vec!["census", "--curve", "0,0,0,0,0", "--x", "1000"],
        vec!["frobnicate"],
        vec!["gl2"],
    ] {
        let o = ectwin(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn computation_errors_exit_one_with_name() {
    let o = ectwin(&["gl2", "--count-C", "1000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("CapExceeded"));
    let o = ectwin(&["bounds", "--theta", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("OutOfRange"));
    let o = ectwin(&["census", "--x", "1000", "--me", "6", "--probe-ell", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("NotCoprime"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "theta = 0.6\neps = 0.01\n").unwrap();
    let v = json(&ectwin(&["bounds", "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["theta"], 0.6);
    let v = json(&ectwin(&["bounds", "--config", cfg.to_str().unwrap(), "--theta", "0.5"]));
    assert_eq!(v["theta"], 0.5);
    assert_eq!(v["epsilon"], 0.01);
}

#[test]
fn checkpointed_census_resumes_to_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let base = ["census", "--x", "20000", "--checkpoint-interval", "2000", "--cutoff", "10000"];
    let mut full = base.to_vec();
    let (out_full, dump_full) = (p("full.json"), p("full.csv"));
    full.extend(["--out", &out_full, "--dump-primes", &dump_full]);
    assert!(ectwin(&full).status.success());

    let (ckpt, out_res, dump_res) = (p("run.ckpt"), p("res.json"), p("res.csv"));
    let mut first = base.to_vec();
    first.extend(["--checkpoint", &ckpt, "--stop-after", "9000", "--out", &out_res, "--dump-primes", &dump_res]);
    assert!(ectwin(&first).status.success());
    assert!(!Path::new(&out_res).exists());
    let mut second = base.to_vec();
    second.extend(["--checkpoint", &ckpt, "--out", &out_res, "--dump-primes", &dump_res]);
    assert!(ectwin(&second).status.success());

    assert_eq!(std::fs::read(&out_full).unwrap(), std::fs::read(&out_res).unwrap());
    let dump = std::fs::read_to_string(&dump_full).unwrap();
    assert_eq!(dump, std::fs::read_to_string(&dump_res).unwrap());
    assert_eq!(dump.lines().next(), Some("p,ap,np,gcd_me,omega,big_omega"));
}

#[test]
fn corrupt_checkpoint_reported() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("bad.ckpt");
    std::fs::write(&ckpt, b"KFCK1\xff\xff\xff\xff\xff\xff\xff\xff").unwrap();
    let o = ectwin(&["census", "--x", "1000", "--checkpoint", ckpt.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("CorruptCheckpoint"));
}

#[test]
fn plot_data_from_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = ectwin(&["census", "--x", "5000", "--cutoff", "10000", "--out", report.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = stdout(&ectwin(&["plot-data", report.to_str().unwrap()]));
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "x,pi_twin,prediction,ratio");
    assert_eq!(rows.len(), 11);
    let xs: Vec<u64> = rows[1..].iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[0] < w[1]));
    for r in &rows[1..] {
        let f: Vec<&str> = r.split(',').collect();
        if f[1] != "0" {
            assert!(f[3].parse::<f64>().unwrap() > 0.0);
        }
    }

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"checkpoints": []}"#).unwrap();
    assert_eq!(stdout(&ectwin(&["plot-data", empty.to_str().unwrap()])), "x,pi_twin,prediction,ratio\n");
    std::fs::write(&empty, "{}").unwrap();
    let o = ectwin(&["plot-data", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("MissingCheckpoints"));
}

#[test]
fn constant_and_generated_image() {
    let v = json(&ectwin(&["constant", "--me", "1", "--cutoff", "100000"]));
    let value = v["value"].as_f64().unwrap();
    assert!(value > 0.5 && value < 0.51);
    let v = json(&ectwin(&["constant", "--classical", "--cutoff", "100000"]));
    let lo = v["interval"][0].as_f64().unwrap();
    let hi = v["interval"][1].as_f64().unwrap();
    assert!(lo <= 1.3203236317 && hi >= 1.3203236316);

    let dir = tempfile::tempdir().unwrap();
    let gens = dir.path().join("gens.txt");
    // Upper-triangular Borel subgroup mod 3, order 12.
    std::fs::write(&gens, "1,1;0,1\n2,0;0,1\n1,0;0,2\n").unwrap();
    let spec = format!("gens:{}", gens.display());
    let v = json(&ectwin(&["gl2", "--closure", "--omega", "--me", "3", "--image", &spec, "--format", "json"]));
    assert_eq!(v["closure_size"], 12);
    assert!(v["omega"].as_u64().unwrap() <= 12);
}

#[test]
fn verify_passes() {
    let o = ectwin(&["verify"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("PASS ")), "{out}");
}
