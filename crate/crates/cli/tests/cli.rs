use std::path::Path;
use std::process::{Command, Output};

use boundary_lab_core::{
    default_cap, estimate_functional, sample_ppp, BoundaryFunction, FunctionalSpec, HolderClass, ModelConfig,
};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boundary-lab"))
        .args(args)
        .env_remove("BOUNDARY_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["simulate", "--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["simulate", "--n", "10", "--bogus"])), 1);
    assert_eq!(code(&run(&[])), 1);
    let bad_beta = run(&["simulate", "--n", "10", "--beta", "2"]);
    assert_eq!(code(&bad_beta), 1);
    assert!(!bad_beta.stderr.is_empty());
}

#[test]
fn simulate_then_estimate_matches_the_library_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sample.csv");
    let out = run(&["simulate", "--beta", "0.5", "--radius", "0.8", "--n", "300", "--g", "powb", "--seed", "42", "--out", p(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let meta = read_json(&dir.path().join("sample.json"));
    assert_eq!(meta["n"], 300);
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["config"]["command"], "simulate");

    let est = run(&["estimate", "--beta", "0.5", "--radius", "0.8", "--in", p(&csv), "--functional", "power:2", "--grid", "4096"]);
    assert_eq!(code(&est), 0, "{}", String::from_utf8_lossy(&est.stderr));
    let got = stdout_json(&est)["value"].as_f64().unwrap();

    let h = HolderClass::new(0.5, 0.8).unwrap();
    let config = ModelConfig::new(300, BoundaryFunction::power_ball(h), h).unwrap();
    let sample = sample_ppp(&config, default_cap(&config, 0.0).unwrap(), 42).unwrap();
    let want = estimate_functional(&sample, h, &FunctionalSpec::power(2.0).unwrap(), 4096).unwrap().value;
    assert_eq!(got.to_bits(), want.to_bits(), "{got} vs {want}");
}

#[test]
fn envelope_writes_the_requested_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    assert_eq!(code(&run(&["simulate", "--n", "50", "--seed", "1", "--out", p(&csv)])), 0);
    let env = dir.path().join("env.csv");
    assert_eq!(code(&run(&["envelope", "--in", p(&csv), "--grid", "17", "--out", p(&env)])), 0);
    let text = std::fs::read_to_string(&env).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,ghat"));
    assert_eq!(lines.count(), 17);
    // a missing sidecar is a precondition error
    std::fs::remove_file(dir.path().join("s.json")).unwrap();
    assert_eq!(code(&run(&["envelope", "--in", p(&csv)])), 1);
}

#[test]
fn check_interp_writes_one_row_per_case() {
    let out = run(&["check", "interp", "--corpus", "10", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("case,lhs,rhs,holds"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn check_holder_flags_a_boundary_outside_the_class() {
    assert_eq!(code(&run(&["check", "holder", "--g", "powb"])), 0);
    assert_eq!(code(&run(&["check", "holder", "--beta", "1", "--g", "powb"])), 0);
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g.csv");
    std::fs::write(&grid, "x,g\n0,0\n0.5,2\n1,0\n").unwrap();
    let out = run(&["check", "holder", "--g", &format!("grid:{}", p(&grid))]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn mc_and_rates_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("risk.csv");
    let args = [
        "mc", "--estimator", "fp", "--p", "1", "--g", "const:1", "--ns", "32,64,128,256", "--reps", "200", "--seed", "5",
        "--grid", "1024", "--out", p(&table),
    ];
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read(&table).unwrap();
    assert!(String::from_utf8_lossy(&first)
        .starts_with("n,reps,mean_estimate,bias,mse,rmse,mean_abs_error,var_empirical,var_rhs,discarded\n"));
    let echo = read_json(&dir.path().join("risk.json"));
    assert_eq!(echo["args"]["reps"], 200);

    // the same seed reproduces the table byte for byte
    assert_eq!(code(&run(&args)), 0);
    assert_eq!(std::fs::read(&table).unwrap(), first);

    // at β = 1, p = 1 the RMSE decays like n^{-3/4}
    let fit = run(&["rates", "--in", p(&table), "--target-exponent", "0.75", "--tol", "0.2"]);
    assert_eq!(code(&fit), 0, "{}", String::from_utf8_lossy(&fit.stdout));
    let slope = stdout_json(&fit)["slope"].as_f64().unwrap();
    assert!((slope + 0.75).abs() < 0.2);
    let off = run(&["rates", "--in", p(&table), "--target-exponent", "2.0", "--tol", "0.05"]);
    assert_eq!(code(&off), 2);
}

#[test]
fn mc_rejects_too_few_replications() {
    assert_eq!(code(&run(&["mc", "--ns", "32,64", "--reps", "50"])), 1);
}

#[test]
fn lowerbound_reports_exact_below_lemma() {
    let out = run(&["lowerbound", "--n", "512", "--m", "8", "--reps", "200", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let exact = v["exact_value"].as_f64().unwrap();
    let lemma = v["lemma_bound"].as_f64().unwrap();
    assert!(exact <= lemma);
    assert_eq!(v["m"], 8);
    assert_eq!(v["weights_normalized"], true);
    assert!(v["lr_mean"].as_f64().unwrap().is_finite());
    assert_eq!(code(&run(&["lowerbound", "--n", "10", "--m", "4", "--rn", "0.1"])), 1);
}

#[test]
fn exponents_table_values() {
    let out = run(&["exponents", "--p", "2", "--points", "4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let last = &rows[3];
    assert_eq!(last[0], 1.0);
    assert_eq!(last[1], 2.0);
    assert!((last[2] - 0.75).abs() < 1e-15);
    assert!((last[3] - 0.625).abs() < 1e-15);
    assert!((last[4] - 0.4).abs() < 1e-15);
}

#[test]
fn test_command_writes_per_replication_records() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("test.csv");
    let out = run(&["test", "--n", "128", "--reps", "20", "--seed", "9", "--grid", "1024", "--out", p(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    let alternatives = summary["alternatives"].as_u64().unwrap() as usize;
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("hypothesis,rep,statistic,decision"));
    assert_eq!(lines.count() + summary["discarded"].as_u64().unwrap() as usize, 20 * (alternatives + 1));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let side = dir.path().join("echo.json");
    let out = Command::new(env!("CARGO_BIN_EXE_boundary-lab"))
        .args(["--sidecar", p(&side), "exponents", "--points", "2"])
        .env("BOUNDARY_LAB_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let echo = read_json(&side);
    assert_eq!(echo["threads"], 3);
    assert_eq!(echo["command"], "exponents");
}
