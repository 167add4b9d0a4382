use std::process::Command;

use qudisc_cli::commands::{minerror_report, spectrum_report, unambiguous_report, SWEEP_HEADER};
use qudisc_cli::{exit, run};
use qudisc_core::ProblemConfig;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn qudisc(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("qudisc").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn json(args: &[&str]) -> Value {
    let r = qudisc(args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn config_from(v: &Value) -> ProblemConfig {
    let c = &v["config"];
    let u = |k: &str| c[k].as_u64().unwrap() as u32;
    ProblemConfig::with_priors(
        u("n"),
        u("n_A"),
        u("n_B"),
        u("n_C"),
        c["eta1"].as_f64().unwrap(),
        c["eta2"].as_f64().unwrap(),
    )
    .unwrap()
}

#[test]
fn spectrum_table_rows() {
    let r = qudisc(&["spectrum", "-n", "2", "--na", "1", "--nb", "1", "--nc", "1"]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert!(lines.contains(&"0  1    4"), "{}", r.stdout);
    assert!(lines.contains(&"1  0.5  2"), "{}", r.stdout);
    assert!(lines.contains(&"d2 - d1 = 0"));

    let r = qudisc(&["spectrum", "--dim", "3", "--na", "1", "--nb", "1", "--nc", "1"]);
    assert!(r.stdout.lines().any(|l| l == "0  1    10"), "{}", r.stdout);
    assert!(r.stdout.lines().any(|l| l == "1  0.5  8"), "{}", r.stdout);

    let r = qudisc(&["spectrum", "-n", "2", "--na", "2", "--nb", "1", "--nc", "1"]);
    assert!(r.stdout.contains("d2 - d1 = 1"), "{}", r.stdout);
}

#[test]
fn spectrum_json_round_trips() {
    let v = json(&["spectrum", "-n", "3", "--na", "2", "--nb", "2", "--nc", "1", "--json"]);
    let cfg = config_from(&v);
    let again = serde_json::to_value(spectrum_report(&cfg).unwrap()).unwrap();
    assert_eq!(v, again);
    assert_eq!(v["blocks"].as_array().unwrap().len(), 2);
    // Exact integers travel as strings.
    assert!(v["total"]["d1"].is_string());
}

#[test]
fn unambiguous_json_round_trips() {
    let v = json(&["unambiguous", "-n", "2", "--na", "1", "--nb", "1", "--nc", "1", "--eta1", "0.9", "--json"]);
    assert_eq!(v, unambiguous_report(&config_from(&v)).unwrap());
    assert!((v["total"].as_f64().unwrap() - 0.775).abs() < 1e-12);
    let high = &v["blocks"][1];
    assert_eq!(high["branch"], "HIGH");
    assert!((high["q1"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(high["q2"].as_f64().unwrap(), 1.0);
}

#[test]
fn unambiguous_reference_value() {
    let v = json(&["unambiguous", "-n", "2", "--na", "2", "--nb", "1", "--nc", "1", "--json"]);
    assert!((v["total"].as_f64().unwrap() - 0.794401923).abs() < 1e-9);
    let r = qudisc(&["unambiguous", "-n", "2", "--na", "1", "--nb", "1", "--nc", "1"]);
    assert!(r.stdout.contains("Q_opt = 0.833333333333"), "{}", r.stdout);
}

#[test]
fn minerror_json_round_trips() {
    let v = json(&["minerror", "-n", "2", "--na", "1", "--nb", "1", "--nc", "1", "--json"]);
    assert_eq!(v, minerror_report(&config_from(&v)).unwrap());
    let expected = 0.5 - 3f64.sqrt() / 12.0;
    assert!((v["total"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn swapped_config_reports_original_labels() {
    let v = json(&["spectrum", "-n", "2", "--na", "1", "--nb", "1", "--nc", "2", "--json"]);
    assert_eq!(v["swapped"], true);
    assert_eq!(v["config"]["n_A"], 1);
    assert_eq!(v["config"]["n_C"], 2);
    assert_eq!(v["total"]["d2_minus_d1"], "-1");
}

#[test]
fn bounds_for_equal_programs() {
    let v = json(&["bounds", "--na", "1", "--nb", "1", "--nc", "1", "--json"]);
    let q0 = v["total"]["Q0"].as_f64().unwrap();
    let p0 = v["total"]["P0"].as_f64().unwrap();
    assert!((q0 - 2.0 / 3.0).abs() < 1e-12);
    assert!((p0 - (0.5 - 3f64.sqrt() / 6.0)).abs() < 1e-12);
}

#[test]
fn bounds_precondition_exit_code() {
    let r = qudisc(&["bounds", "--na", "1", "--nb", "1", "--nc", "2"]);
    assert_eq!(r.code, exit::PRECONDITION);
    assert!(r.stdout.contains("P0 = "), "{}", r.stdout);
    assert!(r.stderr.contains("n_A = n_C"), "{}", r.stderr);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["spectrum", "-n", "1", "--na", "1", "--nb", "1", "--nc", "1"],
        vec!["spectrum", "-n", "2", "--na", "0", "--nb", "1", "--nc", "1"],
        vec!["minerror", "-n", "2", "--na", "1", "--nb", "1", "--nc", "1", "--eta1", "1.5"],
        vec!["unambiguous", "-n", "2", "--na", "1", "--nb", "1", "--nc", "1", "--eta1", "nan"],
        vec!["sweep", "--dims", "5..2", "--na", "1", "--nb", "1", "--nc", "1"],
        vec!["sweep", "--dims", "2..4", "--na", "1"],
        vec!["frobnicate"],
    ] {
        let r = qudisc(&args);
        assert_eq!(r.code, exit::USAGE, "{args:?}: {}{}", r.stdout, r.stderr);
    }
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let r =
        qudisc(&["sweep", "--dims", "2..3", "--na", "1", "--nb", "1", "--nc", "1", "--out", target.to_str().unwrap()]);
    assert_eq!(r.code, exit::IO, "{}", r.stderr);
}

#[test]
fn sweep_csv_layout() {
    let r = qudisc(&["sweep", "--dims", "2..200", "--na", "1", "--nb", "1", "--nc", "1"]);
    assert_eq!(r.code, 0);
    assert!(!r.stdout.contains('\r'));
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next().unwrap(), SWEEP_HEADER.join(","));
    let mut count = 0;
    for (line, n) in lines.zip(2u32..) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells[0], n.to_string());
        let q: f64 = cells[5].parse().unwrap();
        let n = n as f64;
        assert!((q - (2.0 * n + 1.0) / (3.0 * n)).abs() < 1e-11, "{line}");
        count += 1;
    }
    assert_eq!(count, 199);
}

#[test]
fn sweep_leaves_q0_empty_when_undefined() {
    let r = qudisc(&["sweep", "-n", "3", "--na", "2", "--nb", "1", "--nc", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let row: Vec<&str> = r.stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[7], "");
    assert!(row[8].parse::<f64>().is_ok());
}

#[test]
fn sweep_equal_copies_json() {
    let v = json(&["sweep", "-n", "2", "--equal-copies", "1..4", "--format", "json"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for (m, row) in (1..).zip(rows) {
        assert_eq!(row["n_A"], m);
        assert_eq!(row["n_B"], m);
        assert_eq!(row["n_C"], m);
    }
    let q: Vec<f64> = rows.iter().map(|r| r["Q_opt"].as_f64().unwrap()).collect();
    assert!(q.windows(2).all(|w| w[1] < w[0]), "{q:?}");
}

#[test]
fn sweep_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let r =
        qudisc(&["sweep", "--dims", "2..5", "--na", "1", "--nb", "2", "--nc", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let direct = qudisc(&["sweep", "--dims", "2..5", "--na", "1", "--nb", "2", "--nc", "1"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct.stdout);
}

#[test]
fn verify_small_grid_passes_and_fault_fails() {
    let ok = qudisc(&["verify", "--max-total-dim", "64"]);
    assert_eq!(ok.code, exit::SUCCESS, "{}", ok.stdout);
    assert!(ok.stdout.ends_with("verify: PASS\n"));
    assert_eq!(ok.stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 6);

    let bad = qudisc(&["verify", "--max-total-dim", "64", "--inject-fault"]);
    assert_eq!(bad.code, exit::VERIFY_FAILED);
    assert!(bad.stdout.contains("FAIL povm"), "{}", bad.stdout);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qudisc");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let out = status(&["spectrum", "-n", "2", "--na", "1", "--nb", "1", "--nc", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("d1 = 6"));
    assert_eq!(status(&["bounds", "--na", "2", "--nb", "1", "--nc", "1"]).status.code(), Some(3));
    assert_eq!(status(&["spectrum", "-n", "2"]).status.code(), Some(2));
    assert_eq!(status(&["--help"]).status.code(), Some(0));
}
