use std::process::{Command, Output};

fn exactcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exactcount"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn n_of_one_is_a_usage_error() {
    assert_eq!(exactcount(&["run", "--n", "1", "--seed", "0"]).status.code(), Some(2));
    assert_eq!(
        exactcount(&["sweep", "--n-values", "5,1", "--out", "x.csv"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn exhausted_budget_exits_one() {
    let out = exactcount(&["run", "--n", "30", "--seed", "1", "--max-interactions", "50"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["stop_condition_met"], false);
    assert!(v["summary"]["convergence_parallel_time"].is_null());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"n": 12, "seed": 4, "max_phase": 30, "schedule": "increment"}"#,
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let out = exactcount(&["run", "--config", path, "--max-phase", "36"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["n"], 12);
    assert_eq!(v["config"]["params"]["max_phase"], 36);
    assert_eq!(v["config"]["params"]["schedule"], "increment");
    assert_eq!(v["summary"]["final_counts_correct"], true);

    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(exactcount(&["run", "--config", path]).status.code(), Some(2));
}

#[test]
fn check_rounding_passes() {
    let out = exactcount(&["check", "rounding"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}

#[test]
fn sweep_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let out = exactcount(&[
        "sweep",
        "--n-values",
        "4,9",
        "--trials",
        "2",
        "--max-phase",
        "20",
        "--stop",
        "stable",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 5);
    assert!(rows.lines().skip(1).all(|l| l.ends_with(",true")));
    assert!(dir.path().join("s.csv.meta.json").exists());
}
