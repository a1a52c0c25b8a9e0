//! End-to-end tests of the `hyperred` binary: exit codes, output routing,
//! determinism, and the round-trip between emitted reports and the input
//! grammar.

use std::io::Write;
use std::process::{Command, Stdio};

use hyperred_cli::{dot, parse_input};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperred"))
}

fn run_stdin(args: &[&str], input: &str) -> (i32, String, String) {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn analyze_stdin_to_stdout() {
    let (code, stdout, stderr) =
        run_stdin(&["analyze", "-"], r#"{"p":5,"roots":["0","5","1","6"],"c":"1"}"#);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("\"schema_version\": \"1\""));
    assert!(stdout.contains("\"toric_rank\": 1"));
    assert!(stderr.is_empty());
}

#[test]
fn analyze_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("curve.json");
    std::fs::write(&input, r#"{"p":5,"roots":["0","5","10","1","6","11"],"c":"1"}"#)
        .unwrap();
    let json = dir.path().join("report.json");
    let dt = dir.path().join("tree.dot");
    let df = dir.path().join("fiber.dot");
    let status = bin()
        .arg("analyze")
        .arg(&input)
        .arg("--json")
        .arg(&json)
        .arg("--dot-tree")
        .arg(&dt)
        .arg("--dot-fiber")
        .arg(&df)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = std::fs::read_to_string(&json).unwrap();
    assert!(report.contains("\"e\": 2"));
    let tree_dot = std::fs::read_to_string(&dt).unwrap();
    let fiber_dot = std::fs::read_to_string(&df).unwrap();
    dot::validate_dot(&tree_dot).unwrap();
    dot::validate_dot(&fiber_dot).unwrap();
    assert!(fiber_dot.contains("label=\"g=1\""));
    assert!(tree_dot.contains("style=dashed"));
}

#[test]
fn input_errors_exit_one() {
    for bad in [
        r#"{"p":4,"roots":["0","1","2","3"]}"#,
        r#"{"p":2,"roots":["0","1","2","3"]}"#,
        r#"{"p":5,"roots":["0","0","1","2"]}"#,
        r#"{"p":5,"roots":["0","1","2"]}"#,
        r#"{"p":5,"coeffs":["-2","0","0","0","1"]}"#,
        "not even close",
    ] {
        let (code, stdout, stderr) = run_stdin(&["analyze", "-"], bad);
        assert_eq!(code, 1, "input {bad} should exit 1, stderr: {stderr}");
        assert!(stdout.is_empty());
        assert!(stderr.starts_with("error:"), "stderr was: {stderr}");
        assert!(
            !stderr.contains('\x1b'),
            "no ANSI codes when stderr is not a terminal"
        );
    }
}

#[test]
fn missing_file_exits_one() {
    let (code, _, stderr) = run_stdin(&["analyze", "/no/such/file.json"], "");
    assert_eq!(code, 1);
    assert!(stderr.starts_with("error:"));
}

#[test]
fn atlas_counts_and_determinism() {
    let (code, first, _) = run_stdin(&["atlas", "2"], "");
    assert_eq!(code, 0);
    assert!(first.contains("\"count\": 7"));
    let (_, second, _) = run_stdin(&["atlas", "2"], "");
    assert_eq!(first, second, "atlas output must be byte-stable");
    let (code, _, stderr) = run_stdin(&["atlas", "0"], "");
    assert_eq!(code, 1);
    assert!(stderr.contains("genus"));
}

#[test]
fn analyze_is_byte_deterministic() {
    let input = r#"p=13; c=26; roots=[0, 13, 169, 1, 14, inf]"#;
    let (c1, first, _) = run_stdin(&["analyze", "-"], input);
    let (c2, second, _) = run_stdin(&["analyze", "-"], input);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(first, second);
}

#[test]
fn check_reports_case_count() {
    let (code, stdout, stderr) = run_stdin(&["check", "--seed", "7", "--cases", "25"], "");
    assert_eq!(code, 0, "stderr: {stderr}");
    assert_eq!(stdout.trim(), "25/25 ok");
}

#[test]
fn report_echo_round_trips() {
    for input in [
        r#"{"p":5,"roots":["0","5","1","6"],"c":"1"}"#,
        r#"{"p":7,"coeffs":["0","-6","11","-6","1"]}"#,
        "p=11; c=2/3; roots=[0, 11, 1, inf]",
    ] {
        let original = parse_input(input).unwrap();
        let (code, stdout, _) = run_stdin(&["analyze", "-"], input);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        let echoed = serde_json::to_string(&doc["input"]).unwrap();
        assert_eq!(parse_input(&echoed).unwrap(), original);
    }
}

#[test]
fn normalization_is_reported() {
    let (code, stdout, _) = run_stdin(
        &["analyze", "-"],
        r#"{"p":5,"roots":["0","1","2","inf"],"c":"1"}"#,
    );
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["normalization"]["mobius"], "inversion");
    assert_eq!(doc["normalization"]["a"], "3");
    assert_eq!(doc["leading_coefficient"], "6");
    let points: Vec<&str> = doc["branch_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(points, vec!["-1/3", "-1/2", "-1", "0"]);
}
