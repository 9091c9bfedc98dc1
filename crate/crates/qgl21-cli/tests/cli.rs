//! End-to-end runs of the `qgl21` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qgl21::{build_rep, Generator, RealizationParams};
use qgl21_cli::repfile::{from_json, import_rep};

fn qgl21(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgl21"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_to_stdout_is_deterministic_and_matches_library() {
    let a = qgl21(&["build", "--j1", "1", "--j2", "-1/2", "--j3", "1/2"]);
    let b = qgl21(&["--sequential", "build", "--j1", "1", "--j2", "-1/2", "--j3", "1/2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let rep = from_json(&stdout(&a), "stdout").unwrap();
    let p = RealizationParams::from_twice(2, -1, 1);
    assert_eq!(rep, build_rep(&p).unwrap());
}

#[test]
fn build_writes_json_then_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("rep.json");
    let o = qgl21(&["build", "--j1", "1/2", "--j2", "1", "--out", path(&file)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(import_rep(&file).unwrap().dim(), 8);
    let v = qgl21(&["verify", "--rep", path(&file)]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
    assert!(stdout(&v).lines().last().unwrap().starts_with("PASS"));
}

#[test]
fn csv_export_writes_one_file_per_generator() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("rep.csv");
    let o = qgl21(&["build", "--j1", "1/2", "--j2", "0", "--format", "csv", "--out", path(&file)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for g in Generator::ALL {
        let f = dir.path().join(format!("rep_{}.csv", g.name()));
        let text = fs::read_to_string(&f).unwrap();
        assert!(text.starts_with("row,col,value\n"), "{}", f.display());
    }
    let h1 = fs::read_to_string(dir.path().join("rep_H1.csv")).unwrap();
    assert!(h1.lines().skip(1).all(|l| {
        let parts: Vec<&str> = l.split(',').collect();
        parts[0] == parts[1] && parts[2].parse::<i64>().is_ok()
    }));
}

#[test]
fn csv_without_out_is_usage_error() {
    let o = qgl21(&["build", "--j1", "1/2", "--j2", "0", "--format", "csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--out"));
}

#[test]
fn perturbed_matrix_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("rep.json");
    let rep = build_rep(&RealizationParams::from_twice(1, 2, 0)).unwrap();
    let e32 = rep.matrix(Generator::E32).scaled(&qgl21::QScalar::from_int(2));
    let bad = rep.with_matrix(Generator::E32, e32);
    fs::write(&file, qgl21_cli::repfile::to_json(&bad)).unwrap();
    let o = qgl21(&["verify", "--rep", path(&file)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn malformed_inputs_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cut.json");
    let text = qgl21_cli::repfile::to_json(&build_rep(&RealizationParams::from_twice(1, 1, 0)).unwrap());
    fs::write(&file, &text[..text.len() / 3]).unwrap();
    let o = qgl21(&["verify", "--rep", path(&file)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cut.json:"), "{}", stderr(&o));

    let o = qgl21(&["build", "--j1", "-1/2", "--j2", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--j1"));

    let o = qgl21(&["verify", "--rep", path(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 2);

    let o = qgl21(&["verify"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--j1"));
}

#[test]
fn bad_coefficient_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f.cf");
    fs::write(&file, "F1 = 1\nF2 = qnum(N +\n").unwrap();
    let o = qgl21(&["build", "--j1", "1/2", "--j2", "1", "--coeffs", path(&file)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("f.cf"), "{}", stderr(&o));
}

#[test]
fn custom_coefficients_round_trip_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let cf = dir.path().join("f.cf");
    let out = dir.path().join("rep.json");
    fs::write(&cf, "F1 = qpow(N)\nF2 = qpow(N)\nF3 = qpow(N)\nF4 = qpow(N)\n").unwrap();
    let o = qgl21(&["build", "--j1", "1", "--j2", "1/2", "--coeffs", path(&cf), "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = qgl21(&["verify", "--rep", path(&out)]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
}

#[test]
fn classify_reports_and_writes_quotient() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.json");
    let o = qgl21(&["classify", "--j1", "1/2", "--j2", "0", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("Nontypical2, invariant = V1⊕V2, quotient dim 5"));
    assert_eq!(import_rep(&out).unwrap().dim(), 5);

    let o = qgl21(&["classify", "--j1", "1", "--j2", "-3/2"]);
    assert!(stdout(&o).starts_with("Nontypical1, invariant = V1⊕V3"), "{}", stdout(&o));

    let o = qgl21(&["classify", "--j1", "1", "--j2", "1"]);
    assert_eq!(stdout(&o).trim(), "Typical, irreducible, dim 12");
}

#[test]
fn quotient_of_non_invariant_towers_fails() {
    let o = qgl21(&["quotient", "--j1", "1/2", "--j2", "0", "--towers", "4"]);
    assert_eq!(code(&o), 1);
    let o = qgl21(&["quotient", "--j1", "1/2", "--j2", "0", "--towers", "9"]);
    assert_eq!(code(&o), 2);
    let o = qgl21(&["quotient", "--j1", "1/2", "--j2", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn limit_accepts_rational_squares_only() {
    let base = ["limit", "--j1", "1/2", "--j2", "3/2"];
    let run = |q: &str| {
        let mut a = base.to_vec();
        a.extend(["--q", q]);
        code(&qgl21(&a))
    };
    assert_eq!(run("1"), 0);
    assert_eq!(run("4"), 0);
    assert_eq!(run("9/16"), 0);
    assert_eq!(run("2"), 2);
    assert_eq!(run("-4"), 2);
    assert_eq!(run("abc"), 2);
}

#[test]
fn factorize_reports_per_basis_vector() {
    let o = qgl21(&["factorize", "--j1", "1/2", "--j2", "1"]);
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.contains("basis ")).count(), 8);
    for l in s.lines().filter(|l| l.contains("(V1") || l.contains("(V2") || l.contains("(V3")) {
        assert!(l.starts_with("PASS"), "{l}");
    }
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&qgl21(&["--help"])), 0);
    assert_eq!(code(&qgl21(&["--version"])), 0);
    assert_eq!(code(&qgl21(&["nonsense"])), 2);
}
