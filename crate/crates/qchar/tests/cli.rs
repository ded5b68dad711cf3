//! End-to-end tests of the command-line interface: exit codes, output
//! shapes, JSON envelopes, and byte-level determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qchar"));
    // Isolate from ambient configuration.
    for var in [
        "QCHAR_WINDOW",
        "QCHAR_DEGCAP",
        "QCHAR_DEPTH",
        "QCHAR_Q",
        "QCHAR_SEED",
        "QCHAR_FORMAT",
    ] {
        c.env_remove(var);
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn finite_standard_character_prints_four_terms() {
    let out = run(&["qchar", "Y[-1]*Y[-3]"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    // Two fundamental factors expand into four monomials.
    assert_eq!(
        text.lines().filter(|l| l.contains('\t')).count(),
        4,
        "table:\n{text}"
    );
}

#[test]
fn trivial_truncation_prints_one() {
    let out = run(&["--degcap", "0", "qchar", "Psi[0]^-1"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn positive_lweight_is_a_usage_error() {
    let out = run(&["qchar", "Psi[0]^1"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("negative"), "stderr: {}", stderr(&out));
}

#[test]
fn malformed_expression_is_a_usage_error() {
    let out = run(&["qchar", "Q[0]"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("byte"), "stderr: {}", stderr(&out));
}

#[test]
fn hyphenated_window_values_parse() {
    let out = run(&["--window", "-8:0", "qchar", "Psi[0]^-1"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
}

#[test]
fn malformed_window_is_a_usage_error() {
    let out = run(&["--window", "0", "qchar", "Psi[0]^-1"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn limit_that_cannot_stabilize_exits_one() {
    let out = run(&["limit", "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
}

#[test]
fn limit_reports_stabilization_point() {
    let out = run(&["limit"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("stabilized at N0"), "got:\n{text}");
    assert!(text.contains("matches closed form: true"), "got:\n{text}");
}

#[test]
fn divergence_witness_prints_the_ladder() {
    let out = run(&["verify", "divergence", "--N", "3"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    for p in ["q^-1", "q^-3", "q^-5", "q^-7"] {
        assert!(text.contains(p), "missing {p} in:\n{text}");
    }
}

#[test]
fn simulate_row_counts_match_dimensions() {
    let out = run(&["simulate", "1:-1"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.contains('\t')).count(), 2);

    let out = run(&["simulate", "1:-1,1:-3,1:-5"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.contains('\t')).count(), 8);
}

#[test]
fn empty_factor_list_is_a_usage_error() {
    let out = run(&["simulate", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_decomposition_passes_on_the_default_window() {
    let out = run(&["--window", "-8:0", "--degcap", "4", "verify", "decomp"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn json_envelope_has_schema_and_sorted_fields() {
    let out = run(&["--format", "json", "qchar", "Y[-1]"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "qchar");
    assert!(v["params"]["window"].is_string());
    assert!(v["result"].is_object());
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["--format", "json", "--seed", "7", "verify", "multiplicativity", "--samples", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "stderr: {}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn environment_variables_configure_the_run() {
    let out = bin()
        .env("QCHAR_FORMAT", "json")
        .env("QCHAR_DEGCAP", "0")
        .args(["qchar", "Psi[0]^-1"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["params"]["degcap"], 0);
}

#[test]
fn dual_rational_mode_accepts_two_points() {
    let out = run(&["--q", "2:3", "simulate", "1:-1,1:-3"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.contains('\t')).count(), 4);
}

#[test]
fn coincident_dual_points_are_rejected() {
    let out = run(&["--q", "2:2", "simulate", "1:-1"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}
