//! End-to-end checks of the binary: determinism of transcripts across
//! invocations, exit codes, and the report formats.

use std::process::{Command, Output};

fn qvote(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvote"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn identical_invocations_produce_identical_transcripts() {
    let args = [
        "run",
        "--protocol",
        "cdsqc2",
        "--n-voters",
        "4",
        "--votes",
        "1101",
        "--seed",
        "7",
        "--transcript",
        "-",
    ];
    let first = qvote(&args);
    let second = qvote(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
    // Every stdout line is one JSON record.
    for line in String::from_utf8(first.stdout).unwrap().lines() {
        serde_json::from_str::<serde_json::Value>(line).expect("record parses");
    }
}

#[test]
fn run_summary_reports_the_reference_efficiency() {
    let out = qvote(&[
        "run",
        "--protocol",
        "cdsqc2",
        "--n-voters",
        "4",
        "--votes",
        "1101",
        "--seed",
        "7",
        "--json",
    ]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).expect("summary is JSON");
    assert_eq!(summary["tally"], 3);
    assert_eq!(summary["per_vote"]["q"], 5);
    assert_eq!(summary["per_vote"]["b"], 1);
}

#[test]
fn config_errors_exit_two() {
    let out = qvote(&[
        "run",
        "--protocol",
        "cdsqc2",
        "--n-voters",
        "2",
        "--votes",
        "111",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = qvote(&[
        "run",
        "--protocol",
        "cdsqc2",
        "--n-voters",
        "1",
        "--votes",
        "1",
        "--seed",
        "1",
        "--subroutine",
        "gv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn detected_eavesdropping_exits_three() {
    let out = qvote(&[
        "run",
        "--protocol",
        "cdsqc1",
        "--n-voters",
        "2",
        "--votes",
        "11",
        "--seed",
        "3",
        "--adversary",
        "intercept-resend",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("aborts 2"), "{text}");
}

#[test]
fn tzl_without_decoys_cannot_detect_the_same_adversary() {
    let out = qvote(&[
        "run",
        "--protocol",
        "tzl",
        "--n-voters",
        "2",
        "--votes",
        "11",
        "--seed",
        "3",
        "--adversary",
        "intercept-resend",
    ]);
    // Nothing checks the legs, so nothing aborts.
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("aborts 0"), "{text}");
}

#[test]
fn report_orders_protocols_by_efficiency() {
    let out = qvote(&["report", "--format", "jsonl"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let labels: Vec<&str> = rows
        .iter()
        .map(|r| r["protocol"].as_str().unwrap())
        .collect();
    assert_eq!(labels, vec!["cdsqc2", "cdsqc1", "tzl", "tzl+decoys"]);
    let etas: Vec<f64> = rows.iter().map(|r| r["eta"].as_f64().unwrap()).collect();
    assert!((etas[0] - 1.0 / 6.0).abs() < 1e-9);
    assert!((etas[3] - 1.0 / 15.0).abs() < 1e-9);
}

#[test]
fn replace_attack_reports_full_success_without_detection() {
    let out = qvote(&[
        "attack",
        "replace",
        "--seed",
        "5",
        "--target-leg",
        "voting2-qubit",
        "--eve-vote",
        "1",
        "--trials",
        "50",
        "--json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["success_rate"], 1.0);
    assert_eq!(report["detection_rate"], 0.0);
}

#[test]
fn separable_attack_command_runs() {
    let out = qvote(&[
        "attack",
        "separable",
        "--seed",
        "2",
        "--trials",
        "200",
        "--json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["outcome"]["success_rate"], 1.0);
    assert_eq!(report["charlie_match_rate"], 1.0);
}

#[test]
fn trials_fan_out_in_seed_order() {
    let args = [
        "run",
        "--protocol",
        "cdsqc2",
        "--n-voters",
        "2",
        "--votes",
        "random",
        "--seed",
        "100",
        "--trials",
        "8",
        "--json",
    ];
    let first = qvote(&args);
    let second = qvote(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let lines: Vec<String> = String::from_utf8(first.stdout)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    // 8 trial lines plus the aggregate.
    assert_eq!(lines.len(), 9);
    for (t, line) in lines[..8].iter().enumerate() {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(row["trial"], t as u64);
        assert_eq!(row["seed"], 100 + t as u64);
    }
}
