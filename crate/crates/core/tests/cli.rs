use std::fs;
use std::process::{Command, Output};

use hckm::io::SolutionRecord;
use hckm::{evaluate_cost_d, Instance};

fn hckm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hckm"))
        .args(args)
        .output()
        .expect("binary runs")
}

const POINTS: &str = "0,0\n0,1\n10,10\n10,11\n";

#[test]
fn solve_writes_a_consistent_solution() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    let output = dir.path().join("solution.json");
    fs::write(&input, POINTS).unwrap();
    let out = hckm(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--u",
        "2",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let record: SolutionRecord =
        serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    let inst = Instance::from_coords(
        &[&[0.0, 0.0], &[0.0, 1.0], &[10.0, 10.0], &[10.0, 11.0]],
        2,
        2,
    )
    .unwrap();
    let cost = evaluate_cost_d(&inst, &record.partition().unwrap()).unwrap();
    assert!((cost - record.cost_d).abs() <= 1e-9);
    assert!((record.cost_d - 1.0).abs() <= 1e-9);
    assert_eq!(record.config.unwrap().k, 2);
}

#[test]
fn infeasible_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    fs::write(&input, POINTS).unwrap();
    let out = hckm(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "1",
        "--u",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Infeasible instance"));
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    fs::write(&input, POINTS).unwrap();
    let bad = dir.path().join("missing").join("out.json");
    let out = hckm(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--u",
        "2",
        "--output",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    fs::write(&input, "0,0\n1\n").unwrap();
    let out = hckm(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "1",
        "--u",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn oracle_prints_the_optimum() {
    let out = hckm(&[
        "oracle",
        "--generate",
        "uniform:6,2,10",
        "--k",
        "2",
        "--u",
        "3",
        "--seed",
        "4",
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["opt_cost"].as_f64().unwrap() >= 0.0);
    assert_eq!(json["labels"].as_array().unwrap().len(), 6);
}

#[test]
fn check_passes_on_generated_data() {
    let out = hckm(&[
        "check",
        "--generate",
        "blobs:2,4,0.5,10",
        "--k",
        "2",
        "--u",
        "4",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("[PASS] oracle-ratio"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn bench_emits_csv() {
    let out = hckm(&[
        "bench",
        "--sizes",
        "6",
        "--seeds",
        "2",
        "--overseed-factor",
        "0.5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("n,k,u,seed,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn workers_and_no_prune_do_not_change_the_answer() {
    let base = [
        "solve",
        "--generate",
        "blobs:3,5,0.5,6",
        "--k",
        "3",
        "--u",
        "6",
        "--seed",
        "2",
    ];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        let out = hckm(&args);
        assert!(out.status.success());
        let record: SolutionRecord = serde_json::from_slice(&out.stdout).unwrap();
        (record.labels, record.cost_h.unwrap())
    };
    let plain = run(&[]);
    assert_eq!(run(&["--workers", "4"]), plain);
    // the cap only drops placements that cannot beat the best one
    assert_eq!(run(&["--no-prune"]).1, plain.1);
}
