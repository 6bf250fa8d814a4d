use std::io::Write;
use std::process::{Command, Output};

use burnside_core::burnside::{verify_report, TheoremReport, Verdict};
use burnside_core::quat::DecompositionReport;
use burnside_core::report::{AnalysisReport, ChainReport, TriangularizeReport};
use tempfile::NamedTempFile;

const MATRIX_UNITS_GF2: &str = "\
# off-diagonal matrix units in M_3(GF(2))
field GF(2)
matrix
  0 1 0
  0 0 0
  0 0 0
matrix
  0 0 1
  0 0 0
  0 0 0
matrix
  0 0 0
  1 0 0
  0 0 0
matrix
  0 0 0
  0 0 1
  0 0 0
matrix
  0 0 0
  0 0 0
  1 0 0
matrix
  0 0 0
  0 0 0
  0 1 0
";

const SWAP_Q: &str = "field Q\nmatrix\n 0 1\n 0 0\nmatrix\n 0 0\n 1 0\n";
const OMEGA: &str = "field GF(2)\nmatrix\n 0 1\n 1 1\n";
const SQUARE_ZERO: &str = "quaternion\nmatrix\n i j\n -j i\n";

fn family(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn burnside(args: &[&str], file: &NamedTempFile) -> Output {
    Command::new(env!("CARGO_BIN_EXE_burnside"))
        .args(args)
        .arg(file.path())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn burnside_check_on_matrix_units() {
    let f = family(MATRIX_UNITS_GF2);
    let out = burnside(&["burnside-check", "--emit", "machine"], &f);
    assert_eq!(out.status.code(), Some(0));
    let report = TheoremReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.verdict, Verdict::TheoremInstanceVerified);
    assert_eq!(report.conclusion.data.algebra_dim, 9);
    assert!(verify_report(&report).unwrap().is_empty());

    let text = burnside(&["burnside-check"], &f);
    assert_eq!(text.status.code(), Some(0));
    assert!(stdout(&text).contains("verdict: TheoremInstanceVerified"));
}

#[test]
fn omega_fails_the_hypothesis() {
    let f = family(OMEGA);
    let out = burnside(&["burnside-check", "--emit", "machine"], &f);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(TheoremReport::from_json(&stdout(&out)).unwrap().verdict, Verdict::HypothesisFails);

    let out = burnside(&["analyze", "--emit", "machine"], &f);
    assert_eq!(out.status.code(), Some(0));
    let a = AnalysisReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(a.division_degree, Some(2));
    assert!(a.verify().unwrap().is_empty());
}

#[test]
fn triangularize_outcomes() {
    let out = burnside(&["triangularize", "--emit", "machine"], &family(SWAP_Q));
    assert_eq!(out.status.code(), Some(2));
    let r = TriangularizeReport::from_json(&stdout(&out)).unwrap();
    assert!(!r.is_triangularized());
    assert!(r.verify().unwrap().is_empty());

    let upper = family("field GF(3)\nmatrix\n 1 0\n 2 1\nmatrix\n 2 0\n 1 0\n");
    let out = burnside(&["triangularize", "--emit", "machine"], &upper);
    assert_eq!(out.status.code(), Some(0));
    let r = TriangularizeReport::from_json(&stdout(&out)).unwrap();
    assert!(r.is_triangularized() && r.verify().unwrap().is_empty());
}

#[test]
fn quaternion_square_zero_example() {
    let out = burnside(&["quat-decompose", "--emit", "machine"], &family(SQUARE_ZERO));
    assert_eq!(out.status.code(), Some(0));
    let reports: Vec<DecompositionReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].scalar, "0");
    assert_eq!(reports[0].terms.len(), 1);
    assert!(reports[0].verify().unwrap());
}

#[test]
fn descent_check_with_subfield() {
    let text = "field GF(4)\nmatrix\n 0 t\n 0 0\nmatrix\n 0 0\n t+1 0\n";
    let f = family(text);
    let out = burnside(&["descent-check", "--subfield", "GF(2)", "--emit", "machine"], &f);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = TheoremReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.verdict, Verdict::TheoremInstanceVerified);
    assert!(report.conclusion.data.similarity.is_some());
    assert!(verify_report(&report).unwrap().is_empty());

    let in_file = family(&text.replace("field GF(4)\n", "field GF(4)\nsubfield GF(2)\n"));
    assert_eq!(burnside(&["descent-check"], &in_file).status.code(), Some(0));

    let missing = burnside(&["descent-check", "--emit", "machine"], &f);
    assert_eq!(missing.status.code(), Some(4));
    assert!(missing.stdout.is_empty());
}

#[test]
fn chop_reports_composition_series() {
    let f = family("field GF(3)\nmatrix\n 1 1 0\n 0 1 0\n 0 0 2\n");
    let out = burnside(&["chop", "--emit", "machine"], &f);
    assert_eq!(out.status.code(), Some(0));
    let r = ChainReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(r.quotient_dims, vec![1, 1, 1]);
    assert!(r.verify().unwrap().is_empty());
}

#[test]
fn machine_output_is_deterministic() {
    let f = family(MATRIX_UNITS_GF2);
    for cmd in ["analyze", "burnside-check", "triangularize", "chop"] {
        let a = burnside(&[cmd, "--emit", "machine", "--seed", "7"], &f);
        let b = burnside(&[cmd, "--emit", "machine", "--seed", "7"], &f);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn parse_errors_exit_4_without_output() {
    let out = burnside(&["burnside-check", "--emit", "machine"], &family("field Q\nmatrix\n  1   1/0\n  0 1\n"));
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("3:7") && err.contains("1/0") && err.contains("zero denominator"), "{err}");

    let out = burnside(&["descent-check"], &family("field GF(4)\nsubfield Q\nmatrix\n 1\n"));
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8(out.stderr).unwrap().contains("unsupported field tower"));

    let out = burnside(&["quat-decompose"], &family(OMEGA));
    assert_eq!(out.status.code(), Some(4));
    let out = burnside(&["burnside-check"], &family(SQUARE_ZERO));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_4() {
    let f = family(OMEGA);
    assert_eq!(burnside(&["burnside-check", "--bogus"], &f).status.code(), Some(4));
    assert_eq!(burnside(&["no-such-command"], &f).status.code(), Some(4));
    assert_eq!(burnside(&["burnside-check", "--emit", "xml"], &f).status.code(), Some(4));
    let missing = Command::new(env!("CARGO_BIN_EXE_burnside"))
        .args(["analyze", "/nonexistent/family"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(4));
    let help = Command::new(env!("CARGO_BIN_EXE_burnside")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn truncated_closure_is_incomplete() {
    let f = family("field Q\nmatrix\n 1 1\n 0 1\n");
    let out = burnside(&["burnside-check", "--cap", "5", "--emit", "machine"], &f);
    assert_eq!(out.status.code(), Some(3));
    let report = TheoremReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.verdict, Verdict::Incomplete);
    assert!(!report.closure.complete);
}
