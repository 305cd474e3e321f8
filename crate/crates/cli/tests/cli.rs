use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bec-lab")).args(args).current_dir(dir).output().unwrap()
}

fn run_env(args: &[&str], dir: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bec-lab"))
        .args(args)
        .current_dir(dir)
        .env("BEC_LAB_THREADS", threads)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn blowup_reports_positive_kappa_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["blowup", "--X", "12", "--n", "4097", "--out", "a"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&dir.path().join("a/blowup.json"));
    assert!(summary["kappa"].as_f64().unwrap() > 0.0);
    assert!(summary["hamiltonian_dev"].as_f64().unwrap() <= 1e-6);
    assert_eq!(summary["config"]["X"].as_f64(), Some(12.0));
    run(&["blowup", "--X", "12", "--n", "4097", "--out", "a2"], dir.path());
    for f in ["blowup.json", "blowup.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("a2").join(f)).unwrap();
        // Only the echoed output directory differs.
        let strip = |v: Vec<u8>| String::from_utf8(v).unwrap().replace("\"a2\"", "\"a\"");
        assert_eq!(strip(a), strip(b), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("a/blowup.csv")).unwrap();
    assert!(csv.starts_with("# config = {"));
}

#[test]
fn blowup_rejects_narrow_window() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["blowup", "--X", "3"], dir.path()).status.code(), Some(1));
}

#[test]
fn solve_explicit_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--lambda", "3", "--out", "s"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = read_json(&dir.path().join("s/solve_lambda_3e0.json"));
    assert!(r["flags"]["pinning_dev"].as_f64().unwrap().abs() <= 1e-8);
    assert!(r["hamiltonian_dev"].as_f64().unwrap() <= 1e-6);
    assert!(dir.path().join("s/solution_lambda_3e0.csv").exists());
}

#[test]
fn solve_rejects_weak_coupling() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["solve", "--lambda", "1.0"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["solve"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["nonsense"], dir.path()).status.code(), Some(1));
}

#[test]
fn solve_from_seed_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&["solve", "--lambda", "1e4", "--n", "4097", "--out", "coarse"], dir.path());
    assert_eq!(first.status.code(), Some(0));
    let seed = "coarse/solution_lambda_1e4.csv";
    let out = run(&["solve", "--lambda", "1e4", "--seed", seed, "--out", "fine"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("fine/solve_lambda_1e4.json"));
    assert!(r["iterations"].as_u64().unwrap() > 0);
    assert!(r["n"].as_u64().unwrap() > 4097);
    assert!(r["hamiltonian_dev"].as_f64().unwrap() <= 1e-6);
    let missing = run(&["solve", "--lambda", "1e4", "--seed", "nope.csv"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn verify_rejects_short_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--lambda-range", "10:100:1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_reports_and_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sweep.toml"),
        "lambda_range = \"10:1e4:1\"\nseeding = \"composite\"\nslack = 0.0\nout = \"zero\"\n",
    )
    .unwrap();
    let zero = run(&["verify", "--config", "sweep.toml"], dir.path());
    assert_eq!(zero.status.code(), Some(3));
    let v = read_json(&dir.path().join("zero/verdicts.json"));
    for name in ["outer_order", "gap_uniformity", "tension_residual_order"] {
        assert_eq!(v["verdicts"][name]["pass"], Value::Bool(false), "{name}");
    }
    assert!(String::from_utf8_lossy(&zero.stderr).contains("outer_order"));

    // Flags override the file.
    let nominal = run(&["verify", "--config", "sweep.toml", "--slack", "1", "--out", "one"], dir.path());
    assert_eq!(nominal.status.code(), Some(0), "{}", String::from_utf8_lossy(&nominal.stdout));
    let v = read_json(&dir.path().join("one/verdicts.json"));
    for name in ["outer_order", "spectral_gap", "tension_coefficient"] {
        assert!(v["verdicts"][name]["pass"].is_boolean(), "{name}");
    }
    assert_eq!(v["config"]["slack"].as_f64(), Some(1.0));
    assert_eq!(v["all_pass"], Value::Bool(true));
    let csv = std::fs::read_to_string(dir.path().join("one/sweep.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 5);

    let capped = run_env(&["verify", "--config", "sweep.toml", "--slack", "1", "--out", "one_thread"], dir.path(), "1");
    assert_eq!(capped.status.code(), Some(0));
    let a = std::fs::read_to_string(dir.path().join("one/sweep.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("one_thread/sweep.csv")).unwrap();
    assert_eq!(a.replace("\"one\"", "\"one_thread\""), b);
}

#[test]
fn composite_spectrum_energy_run() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["composite", "spectrum", "energy"] {
        let out = run(&[cmd, "--lambda", "1e3", "--out", "r"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let c = read_json(&dir.path().join("r/composite_lambda_1e3.json"));
    assert!(c["xi"].as_f64().unwrap() > 0.0);
    let s = read_json(&dir.path().join("r/spectrum_lambda_1e3.json"));
    assert!(s["spectrum"]["lambda2"].as_f64().unwrap() > 1.0);
    let e = read_json(&dir.path().join("r/energy_lambda_1e3.json"));
    assert!(e["energy"]["i1"].as_f64().unwrap() < 0.0);
    let lead = run(&["composite", "--lambda", "1e3", "--variant", "leading", "--out", "l"], dir.path());
    assert_eq!(lead.status.code(), Some(0));
    let bad = run(&["composite", "--lambda", "1e3", "--variant", "sideways"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn continue_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["continue", "--lambda-range", "2:200:1", "--out", "c"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = read_json(&dir.path().join("c/continue.json"));
    assert_eq!(r["solutions"].as_array().unwrap().len(), 3);
    assert_eq!(r["halvings"].as_u64(), Some(0));
    assert!(dir.path().join("c/trace.csv").exists());
}
