use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn spinclone(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinclone")).current_dir(dir).args(args).output().unwrap()
}

/// Header and first data row as (column, value) pairs.
fn first_row(path: &Path) -> Vec<(String, String)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let head = r.headers().unwrap().clone();
    let row = r.records().next().unwrap().unwrap();
    head.iter().zip(row.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect()
}

fn value(row: &[(String, String)], col: &str) -> f64 {
    row.iter().find(|(h, _)| h == col).unwrap().1.parse().unwrap()
}

#[test]
fn pcc_one_to_two_row() {
    let dir = TempDir::new().unwrap();
    let out = spinclone(dir.path(), &["pcc", "--M", "2", "--model", "xy", "--theta", "1.5707963"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = first_row(&dir.path().join("pcc.csv"));
    assert!((value(&row, "F") - 0.8535534).abs() < 5e-8);
    assert!((value(&row, "B") - 0.7071068).abs() < 5e-7);
    assert!((value(&row, "t") - 2.2214415).abs() < 5e-7);
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("pcc.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["subcommand"], "pcc");
    assert!(meta["versions"]["spinclone"].is_string());
    assert!(meta["timestamp_unix"].is_u64());
}

#[test]
fn universal_reaches_thirteen_eighteenths() {
    let dir = TempDir::new().unwrap();
    assert!(spinclone(dir.path(), &["universal"]).status.success());
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("universal.csv.json")).unwrap()).unwrap();
    let s = &meta["summary"];
    assert!((s["F"].as_f64().unwrap() - 0.7222222).abs() < 5e-8);
    assert!((s["t"].as_f64().unwrap() - 2.0943951).abs() < 5e-7);
    assert_eq!(s["J_bb"].as_f64().unwrap(), 0.0);
}

fn assert_no_outputs(dir: &Path) {
    let written: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv" || x == "json"))
        .collect();
    assert!(written.is_empty(), "{written:?}");
}

#[test]
fn malformed_config_exits_two_without_output() {
    let dir = TempDir::new().unwrap();
    for text in ["subcommand = \"pcc\"\nbogus = 3\n", "subcommand = \"pcc\"\nM = \"two\"\n", "M = [2,\n"] {
        std::fs::write(dir.path().join("run.toml"), text).unwrap();
        let out = spinclone(dir.path(), &["--config", "run.toml"]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert_no_outputs(dir.path());
    }
}

#[test]
fn stochastic_subcommands_require_a_seed() {
    let dir = TempDir::new().unwrap();
    for sub in ["disorder", "classical-noise", "tetrahedron"] {
        assert_eq!(spinclone(dir.path(), &[sub]).status.code(), Some(2));
    }
    assert_no_outputs(dir.path());
}

#[test]
fn numerical_failure_exits_three() {
    let dir = TempDir::new().unwrap();
    // the threshold window ends before the fidelity can rise
    let out = spinclone(
        dir.path(),
        &["nm", "--t_max_over_J", "100", "--n_B", "6", "--threshold_t_max_over_J", "0.05"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_no_outputs(dir.path());
}

#[test]
fn config_file_and_flags_combine() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "subcommand = \"disorder\"\nseed = 11\noutput = \"res/dis.csv\"\nM = [2]\nn_realizations = 20\nmu = [0.0]\n",
    )
    .unwrap();
    let out = spinclone(dir.path(), &["--config", "run.toml"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = first_row(&dir.path().join("res/dis.csv"));
    assert_eq!(value(&row, "seed"), 11.0);
    assert_eq!(value(&row, "n"), 20.0);

    // flag overrides the file; a mismatched subcommand is refused
    let out = spinclone(dir.path(), &["disorder", "--config", "run.toml", "--n_realizations", "30", "-o", "b.csv"]);
    assert!(out.status.success());
    assert_eq!(value(&first_row(&dir.path().join("b.csv")), "n"), 30.0);
    assert_eq!(spinclone(dir.path(), &["pcc", "--config", "run.toml", "-o", "c.csv"]).status.code(), Some(2));
}

#[test]
fn bad_worker_count_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spinclone"))
        .current_dir(dir.path())
        .env("SPINCLONE_WORKERS", "zero")
        .arg("qudit")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
