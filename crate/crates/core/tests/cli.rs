use std::path::Path;
use std::process::{Command, Output};

use fraclap::weights::weight_oracle;
use serde_json::Value;

fn fraclap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclap"))
        .args(args)
        .env_remove("FRACLAP_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// `(sq_lag, omega)` rows of `weights` CSV output.
fn weight_rows(csv: &str) -> Vec<(u64, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,d,h,sq_lag,omega"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect()
}

#[test]
fn weights_alpha_two() {
    let o = fraclap(&["weights", "--alpha", "2", "--dim", "1", "--h", "1", "--max-lag", "4"]);
    assert!(o.status.success());
    let rows = weight_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert!((rows[0].1 - std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-15);
    for (n, &(m, w)) in rows.iter().enumerate().skip(1) {
        let n = n as f64;
        assert_eq!(m as f64, n * n);
        assert_eq!(w, 2.0 * (-1f64).powi(n as i32) / (n * n));
    }
}

#[test]
fn weights_alpha_zero_is_identity() {
    let o = fraclap(&["weights", "--alpha", "0", "--max-lag", "3"]);
    let rows = weight_rows(&stdout(&o));
    assert_eq!(rows[0], (0, 1.0));
    assert!(rows[1..].iter().all(|r| r.1 == 0.0));
}

#[test]
fn weights_two_dimensional_match_oracle() {
    let o = fraclap(&["weights", "--alpha", "0.5", "--dim", "2", "--max-lag", "6"]);
    let rows = weight_rows(&stdout(&o));
    // every sum of two squares up to 36
    assert!(rows.iter().any(|r| r.0 == 25) && rows.iter().all(|r| r.0 <= 36));
    for (m, w) in rows {
        let o = weight_oracle(0.5, 1.0, 2, m).unwrap();
        assert!((w - o).abs() <= 1e-9 * o.abs(), "m={m}: {w} vs {o}");
    }
}

#[test]
fn weights_json() {
    let o = fraclap(&["weights", "--alpha", "1", "--max-lag", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["weights"].as_array().unwrap().len(), 3);
    assert_eq!(v["weights"][2]["omega"].as_f64().unwrap(), 0.0);
}

#[test]
fn apply_identity_has_zero_error() {
    let o = fraclap(&["apply", "--example", "ex1", "--alpha", "0", "--h", "0.125"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["linf_error"].as_f64(), Some(0.0));
    assert_eq!(v["l2_error"].as_f64(), Some(0.0));
}

#[test]
fn apply_writes_grid_function() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = fraclap(&["apply", "--example", "ex2", "--alpha", "1", "--h", "1/16", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v = fraclap::grid::read_csv(&out).unwrap();
    assert_eq!(v.len(), 31);
    let summary: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(summary["linf_error"].as_f64().unwrap() < 1e-3);
}

#[test]
fn bench_table1_cell() {
    let o = fraclap(&["bench", "--suite", "table1", "--alphas", "0.5", "--hs", "0.5,0.25"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let line = csv.lines().find(|l| l.starts_with("ex1,0.5,linf,2.5")).expect("h = 1/4 row");
    let err: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
    assert!((err - 9.0065e-4).abs() < 5e-9, "{err}");
    assert_eq!(format!("{err:.1e}"), "9.0e-4");
}

#[test]
fn bench_writes_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t3.json");
    let o = fraclap(&[
        "bench", "--suite", "table3", "--alphas", "1", "--hs", "1/8,1/16", "--format", "json",
        "--out", out.to_str().unwrap(), "--plot-dir", dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    let plot = std::fs::read_to_string(dir.path().join("ex2_alpha1_a1_s4_linf.dat")).unwrap();
    assert_eq!(plot.lines().filter(|l| !l.starts_with('#')).count(), 2);
}

fn without_timing(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn solve_poisson_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = fraclap(&["solve", "--problem", "poisson", "--alpha", "1", "--s", "4", "--h", "0.015625", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("effective configuration"));
    }
    let ra = without_timing(&a);
    assert_eq!(ra, without_timing(&b));
    assert!(ra["converged"].as_bool().unwrap());
    assert!(ra["error"]["l2"].as_f64().unwrap() < 1e-6);
    assert!(dir.path().join("a.solution.csv").exists());
    assert_eq!(
        std::fs::read(dir.path().join("a.solution.csv")).unwrap(),
        std::fs::read(dir.path().join("b.solution.csv")).unwrap()
    );
    let full: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert!(full["timing"]["wall_time_ms"].is_number());
}

#[test]
fn gaussian_solve_logs_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = fraclap(&["solve", "--problem", "gaussian2d", "--alpha", "1.7", "--h", "1/8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v = without_timing(&out);
    assert!(v["truncation"]["L"].as_f64().unwrap() >= 1.5);
    assert!(v["truncation"]["tau_ext"].as_f64().unwrap() > 0.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("extent"));
}

#[test]
fn exit_codes() {
    assert_eq!(fraclap(&["solve", "--problem", "poisson", "--alpha", "2.5", "--h", "0.1"]).status.code(), Some(2));
    assert_eq!(fraclap(&["weights", "--alpha", "1", "--dim", "4"]).status.code(), Some(2));
    assert_eq!(fraclap(&["apply", "--example", "ex1", "--alpha", "1", "--h", "-1"]).status.code(), Some(2));
    assert_eq!(fraclap(&["bench", "--suite", "table2"]).status.code(), Some(2));
    assert_eq!(fraclap(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fraclap(&["solve", "--problem", "coexist", "--alpha", "0.5", "--lambda1", "1.5", "--h", "0.25"]).status.code(), Some(2));
}

#[test]
fn non_convergence_exits_three_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = fraclap(&["solve", "--problem", "poisson", "--alpha", "1.5", "--h", "1/64", "--max-iter", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let v = without_timing(&out);
    assert_eq!(v["converged"].as_bool(), Some(false));
    assert_eq!(v["iterations"].as_u64(), Some(2));
    assert!(v["residual_history"].as_array().unwrap().len() >= 3);
}

#[test]
fn weight_cache_directory_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_fraclap"))
            .args(["weights", "--alpha", "0.7", "--dim", "2", "--max-lag", "5"])
            .env("FRACLAP_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let cached = std::fs::read_to_string(files[0].as_ref().unwrap().path()).unwrap();
    assert!(cached.starts_with("alpha,d,sq_lag,omega_at_h1\n"));
    assert_eq!(run().stdout, first.stdout);
}
