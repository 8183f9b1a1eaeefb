use std::path::Path;
use std::process::{Command, Output};

fn ifipm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifipm")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn noisy_run_converges_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = ifipm(&[
        "run", "--instance", "random", "--n", "10", "--m", "20", "--seed", "7", "--solver", "sim-tomography",
        "--beta", "0.25", "--eps", "1e-6", "--out-dir", out.to_str().unwrap(), "--no-timing",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read_json(&out.join("summary.json"));
    assert!(summary["final_nu"].as_f64().unwrap() <= 1e-6);
    assert_eq!(summary["termination"]["status"], "converged");
    let csv = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "k,nu,theta,tau,centrality,rp_norm,rd_norm,kappa_newton,alpha,solver_residual,xi_k,wall_ms");
    assert_eq!(csv.lines().count(), summary["iterations"].as_u64().unwrap() as usize + 2);
}

#[test]
fn infeasible_run_reports_tau_and_theta() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let summary = dir.path().join("s.json");
    let o = ifipm(&[
        "run", "--algorithm", "ii", "--n", "4", "--m", "6", "--seed", "3", "--trace-csv", trace.to_str().unwrap(),
        "--summary-json", summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&summary);
    assert!(s["tau"].as_f64().unwrap() <= 1e-4);
    assert!(s["rho"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(&trace).unwrap();
    let row: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    assert!(!row[2].is_empty() && !row[3].is_empty(), "theta and tau filled: {row:?}");
}

#[test]
fn violated_parameter_condition_exits_with_code_2() {
    let o = ifipm(&["run", "--n", "1", "--m", "1", "--solver", "sim-tomography", "--beta", "0.25"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("violated"), "{err}");
}

#[test]
fn config_file_is_layered_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"instance": "lo", "n": 6, "m": 3, "seed": 2, "eps": 1e-8}"#).unwrap();
    let summary = dir.path().join("s.json");
    let o = ifipm(&["run", "--config", cfg.to_str().unwrap(), "--seed", "4", "--summary-json", summary.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&summary);
    assert_eq!(s["seed"], 4);
    assert_eq!(s["n"], 6);
    assert!(s["final_nu"].as_f64().unwrap() <= 1e-8);

    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    let o = ifipm(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generated_instance_solves_from_sdpa() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.dat-s");
    let o = ifipm(&["generate", "--n", "4", "--m", "5", "--seed", "1", "--out", file.to_str().unwrap()]);
    assert!(o.status.success());
    // Without a feasible start only the infeasible method applies.
    let o = ifipm(&["run", "--instance", "sdpa", "--sdpa", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = ifipm(&["run", "--instance", "sdpa", "--sdpa", file.to_str().unwrap(), "--algorithm", "ii", "--rho", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(s["tau"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn missing_sdpa_file_is_an_error() {
    let o = ifipm(&["run", "--instance", "sdpa", "--sdpa", "/nonexistent/x.dat-s", "--algorithm", "ii", "--rho", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn qcost_prints_model_and_table() {
    let o = ifipm(&["qcost", "--n", "16", "--kappa", "100", "--eps", "1e-3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["model"], "unit-constant model");
    assert_eq!(v["table"].as_array().unwrap().len(), 7);
    assert!(v["report"]["qram_accesses"].as_f64().unwrap() > 0.0);
}

#[test]
fn kappa_study_reports_slopes() {
    let o = ifipm(&["kappa-study", "--eps-list", "1e-8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let slope = v[0]["compact_slope"].as_f64().unwrap();
    assert!(slope < -1.5, "{slope}");
}

#[test]
fn batch_writes_one_directory_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = ifipm(&[
        "batch", "--n", "4", "--m", "6", "--first-seed", "10", "--count", "3", "--threads", "2", "--no-timing",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for s in 10..13 {
        assert!(dir.path().join(format!("seed-{s}")).join("summary.json").exists());
    }
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 3);
}
