//! End-to-end checks of the `coral` binary: each subcommand, the file
//! artifacts it writes, and the 0/2/1 exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn coral() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coral"))
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn assert_code(output: &Output, expected: i32) {
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn profile_writes_full_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("profile.csv");
    let output = coral()
        .args(["profile", "--spec", "builtin:xavier-nx", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_code(&output, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "device,cpu_cores,cpu_freq_mhz,gpu_freq_mhz,mem_freq_mhz,concurrency,throughput_fps,power_mw,valid"
    );
    assert_eq!(lines.count(), 2160);
}

#[test]
fn tune_feasible_scenario_exits_zero_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let output = coral()
        .args(["tune", "--scenario"])
        .arg(scenario_path("xavier_dual.toml"))
        .args(["--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_code(&output, 0);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["result"]["feasible"], serde_json::Value::Bool(true));
    assert_eq!(json["result"]["trace"].as_array().unwrap().len(), 10);
    assert_eq!(json["seed"], serde_json::json!(42));
}

#[test]
fn tune_infeasible_scenario_exits_two() {
    let output = coral()
        .args(["tune", "--scenario"])
        .arg(scenario_path("orin_dual.toml"))
        .output()
        .unwrap();
    assert_code(&output, 2);
}

#[test]
fn tune_missing_scenario_exits_one() {
    let output = coral()
        .args(["tune", "--scenario", "/nonexistent/scenario.toml"])
        .output()
        .unwrap();
    assert_code(&output, 1);
}

#[test]
fn compare_emits_report_with_oracle_on_top() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let output = coral()
        .args(["compare", "--scenario"])
        .arg(scenario_path("xavier_dual.toml"))
        .args(["--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_code(&output, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let data_rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data_rows.len(), 5, "one row per default method:\n{text}");
    for prefix in ["coral,", "oracle,", "random10,", "max_power,", "default,"] {
        assert!(data_rows.iter().any(|r| r.starts_with(prefix)), "missing {prefix} in\n{text}");
    }
    // provenance comments are present
    assert!(text.lines().any(|l| l.starts_with("# seed=")));
    assert!(text.lines().any(|l| l.starts_with("# scenario_sha256=")));
}

#[test]
fn tradeoff_flags_a_monotone_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("profile.csv");
    let status = coral()
        .args(["profile", "--spec", "builtin:xavier-nx", "--out"])
        .arg(&profile)
        .status()
        .unwrap();
    assert!(status.success());

    let out = dir.path().join("tradeoff.csv");
    let output = coral()
        .arg("tradeoff")
        .arg("--backend")
        .arg(format!("table:{}", profile.display()))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_code(&output, 0);

    let text = std::fs::read_to_string(&out).unwrap();
    let mut frontier: Vec<(f64, f64)> = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let power: f64 = cols[cols.len() - 3].parse().unwrap();
        let tau: f64 = cols[cols.len() - 2].parse().unwrap();
        if cols[cols.len() - 1] == "1" {
            frontier.push((power, tau));
        }
    }
    assert!(!frontier.is_empty());
    frontier.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for pair in frontier.windows(2) {
        assert!(pair[1].1 >= pair[0].1, "frontier throughput not monotone in power");
    }
}

#[test]
fn identical_seeds_give_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut results = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let output = coral()
            .args(["tune", "--scenario"])
            .arg(scenario_path("xavier_dual.toml"))
            .args(["--seed", "7", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert_code(&output, 0);
        results.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(results[0], results[1]);
}
