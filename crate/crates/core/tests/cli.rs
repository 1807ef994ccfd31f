use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monoroot"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn instance(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("instances")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn solve2d_on_decoupled_instance() {
    let out = bin(&["solve2d", "--instance", &instance("decoupled.json"), "--delta", "2^-8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["signs"], serde_json::json!([0, 0]));
    let root: Vec<f64> = serde_json::from_value(v["root"].clone()).unwrap();
    assert!((root[0] - 0.3).abs() <= 2.0 / 256.0 && (root[1] - 0.6).abs() <= 2.0 / 256.0);
    assert_eq!(v["delta"], "2^-8");
}

#[test]
fn every_solver_subcommand_runs() {
    for args in [
        vec!["solve1d", "--family", "switching-1d", "--seed", "3"],
        vec!["solve2d", "--family", "random-sum-2d", "--mode", "sum", "--trace"],
        vec!["solve2d", "--family", "staircase", "--mode", "exdiag", "--delta", "2^-6"],
        vec!["solvend", "--family", "recursive-3d", "--delta", "2^-7"],
        vec!["solvend", "--family", "separable", "--dim", "4", "--delta", "2^-5", "--base", "bisection1d"],
    ] {
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert!(v["signs"].as_array().unwrap().iter().all(|s| s == 0), "{args:?}");
    }
}

#[test]
fn csv_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("root.csv");
    let out = bin(&[
        "solve2d",
        "--instance",
        &instance("coupled_diag.json"),
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,i1,i2,evaluations"));
    assert_eq!(lines.next().unwrap().split(',').count(), 5);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"family\": \"linear\", \"matrix\": [[1, 0]").unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["solve2d".into(), "--instance".into(), bad.display().to_string()],
        vec!["solve2d".into(), "--instance".into(), "missing.json".into()],
        vec!["solve2d".into(), "--family".into(), "separable".into(), "--delta".into(), "0.3".into()],
        vec!["solve2d".into(), "--instance".into(), instance("exdiag_3d.json")],
        vec!["solve2d".into()],
        vec!["frobnicate".into()],
        vec!["cake".into(), "--agents".into(), "2".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = bin(&refs);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn error_document_on_stdout() {
    let out = bin(&["solve1d", "--instance", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "input");
}

#[test]
fn hypothesis_violation_exits_1() {
    // -x on [0, 1] is negative-switching, so positive bisection must refuse it
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neg.json");
    std::fs::write(&path, r#"{"family": "linear", "matrix": [[-1]], "offset": [0.3]}"#).unwrap();
    let out = bin(&["solve1d", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["error"], "switching-violation");
}

#[test]
fn verify_reports_and_exit_codes() {
    let sn = instance("switching_necessary.json");
    let out = bin(&["verify", "--instance", &sn, "--property", "monotone-profile", "--profile", "canonical", "--delta", "2^-6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["holding"], 4);
    let out = bin(&["verify", "--instance", &sn, "--property", "positive-switching", "--delta", "2^-6"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["holding"], 1);
    let out = bin(&["verify", "--family", "recursive-3d", "--property", "lattice", "--delta", "2^-3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn cake_from_file_and_generated() {
    let out = bin(&["cake", "--instance", &instance("three_uniform.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verification"]["ok"], true);
    let mut pieces: Vec<u64> = v["allocation"]["assignment"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_u64().unwrap())
        .collect();
    pieces.sort();
    assert_eq!(pieces, vec![0, 1, 2]);

    let out = bin(&["cake", "--agents", "6", "--seed", "4", "--r", "2^-8", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["bench", "--family", "random-monotone-2d", "--sweep", "2^-4..2^-12", "--reps", "3", "--no-timing", "--format", "csv"],
        vec!["solve2d", "--family", "rotated-linear", "--mode", "sum", "--seed", "9", "--trace"],
        vec!["cake", "--agents", "5", "--seed", "11", "--trace"],
    ] {
        let a = bin(&args);
        let b = bin(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn bench_csv_shape() {
    let out = bin(&["bench", "--family", "recursive-3d", "--sweep", "2^-3,2^-5", "--reps", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,d,delta,seed,evaluations,wall_time");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("recursive-3d,3,2^-3,0,"));
}

#[test]
fn help_exits_0() {
    let out = bin(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["solve1d", "solve2d", "solvend", "cake", "bench", "verify"] {
        assert!(text.contains(sub), "{sub}");
    }
}
