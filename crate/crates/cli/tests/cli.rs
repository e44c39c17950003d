use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use robustchoice_core::choice::{Assortment, DataVector, PriceVector};
use robustchoice_core::models::TransactionCounts;
use robustchoice_core::robust::{interval_data, robust_bruteforce, IntervalOptions, RobustQuery};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robustchoice"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robustchoice"))
        .args(args)
        .env("ROBUSTCHOICE_WORKERS", workers)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn golden_ranking_prediction() {
    let data = fixture("ranking_data.json");
    let o = run(&["predict", "--data", p(&data), "--target", "1,3", "--prices", "2,1,3", "--method", "ranking"]);
    let golden = std::fs::read_to_string(fixture("predict_ranking.golden.json")).unwrap();
    assert_eq!(stdout(&o), golden);

    let y: DataVector = serde_json::from_str(&std::fs::read_to_string(&data).unwrap()).unwrap();
    let q = RobustQuery::min(y, Assortment::new([1, 3]), PriceVector::from_products(&[2.0, 1.0, 3.0]).unwrap()).unwrap();
    let oracle = robust_bruteforce(&q).unwrap().bound;
    let v: serde_json::Value = serde_json::from_str(&golden).unwrap();
    assert!((v["bound"].as_f64().unwrap() - oracle).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_two() {
    let o = run(&["predict", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("Usage"), "{err}");
    assert!(o.stdout.is_empty());

    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["phase-diagram", "--scheme", "ranking", "--n-range", "5", "--k-range", "1:2"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    for cmd in ["generate", "marginals", "simulate", "predict", "sparsefit", "phase-diagram", "study", "crossval"] {
        let o = run(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"));
    }
}

#[test]
fn domain_errors_exit_one() {
    let o = run(&["sparsefit", "--data", "/nonexistent/y.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["generate", "--family", "nope", "--n", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let data = fixture("ranking_data.json");
    let o = run(&["sparsefit", "--data", p(&data), "--scheme", "comparison"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
}

#[test]
fn study_is_deterministic() {
    let args = ["study", "--family", "mnl-rand", "--n", "6", "--seed", "7"];
    let a = stdout(&run_env(&args, "1"));
    let b = stdout(&run_env(&args, "4"));
    assert_eq!(a, b);
    assert!(a.starts_with("instance,assortment,size,r_true,r_min,r_max,rel_error\n"));
    assert_eq!(a.lines().count(), 101);
}

#[test]
fn generate_marginals_sparsefit_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let y = dir.path().join("y.json");
    stdout(&run(&["generate", "--family", "sparse", "--n", "6", "--k", "4", "--seed", "5", "--out", p(&model)]));
    stdout(&run(&["marginals", "--model", p(&model), "--scheme", "ranking", "--out", p(&y)]));
    let fit: serde_json::Value = serde_json::from_str(&stdout(&run(&["sparsefit", "--data", p(&y)]))).unwrap();
    assert_eq!(fit["status"], "recovered");
    let truth: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(fit["model"].as_array().unwrap().len(), truth["model"].as_array().unwrap().len());
}

#[test]
fn predict_from_transactions() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let assortments = dir.path().join("a.json");
    let tx = dir.path().join("tx.csv");
    std::fs::write(&assortments, "[[1,2],[2,3],[1,3]]").unwrap();
    stdout(&run(&["generate", "--family", "mnl-rand", "--n", "4", "--seed", "2", "--out", p(&model)]));
    stdout(&run(&["simulate", "--model", p(&model), "--assortments", p(&assortments), "--arrivals", "5000", "--seed", "3", "--out", p(&tx)]));
    let bound: serde_json::Value = serde_json::from_str(&stdout(&run(&[
        "predict", "--transactions", p(&tx), "--target", "1,2,3", "--method", "interval", "--z", "auto",
    ])))
    .unwrap();
    assert_eq!(bound["method"], "interval");
    let b = bound["bound"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&b));
}

#[test]
fn sparsefit_refuses_interval_data() {
    let dir = tempfile::tempdir().unwrap();
    let counts = TransactionCounts::new(3, vec![Assortment::new([1, 2])], vec![vec![40, 35, 25]]).unwrap();
    let y = interval_data(&counts, &IntervalOptions::default()).unwrap();
    let path = dir.path().join("y.json");
    std::fs::write(&path, serde_json::to_string(&y).unwrap()).unwrap();
    let o = run(&["sparsefit", "--data", p(&path)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("intervals"));
}

#[test]
fn phase_diagram_schema_and_determinism() {
    let args = ["phase-diagram", "--scheme", "ranking", "--n-range", "5:6", "--k-range", "1:3", "--trials", "10", "--seed", "4"];
    let a = stdout(&run_env(&args, "1"));
    let b = stdout(&run_env(&args, "3"));
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "n,k,trials,recovered,rate");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("5,1,10,10,1"));
}

#[test]
fn crossval_schema_is_stable_across_k() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let assortments = dir.path().join("a.json");
    let tx = dir.path().join("tx.csv");
    let lists: Vec<Vec<usize>> = vec![
        vec![1, 2], vec![2, 3], vec![1, 3], vec![1, 2, 3], vec![1], vec![2], vec![3], vec![1, 4], vec![2, 4], vec![3, 4],
    ];
    std::fs::write(&assortments, serde_json::to_string(&lists).unwrap()).unwrap();
    stdout(&run(&["generate", "--family", "mnl-rand", "--n", "5", "--seed", "8", "--out", p(&model)]));
    stdout(&run(&["simulate", "--model", p(&model), "--assortments", p(&assortments), "--arrivals", "20000", "--seed", "1", "--out", p(&tx)]));
    let mut headers = Vec::new();
    for k in ["2", "10"] {
        let out = stdout(&run(&["crossval", "--transactions", p(&tx), "--k", k, "--z", "auto"]));
        let mut lines = out.lines();
        headers.push(lines.next().unwrap().to_string());
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        for row in rows {
            let err: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
            assert!(err.is_finite(), "{row}");
        }
    }
    assert_eq!(headers[0], headers[1]);
    assert_eq!(headers[0], "method,k,folds,predictions,mean_rel_error");
}
