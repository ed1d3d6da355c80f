use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualgame")).args(args).output().expect("binary runs")
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn check_reports_both_equations() {
    let out = run(&["check", &path("twice.hom"), &path("twice.lam")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("2/2 equations hold"));
}

#[test]
fn check_rejects_an_ill_typed_term_with_a_location() {
    let out = run(&["check", &path("twice.hom"), &path("binder.lam")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("binder.lam:1:1:"), "{}", err);
}

#[test]
fn trace_follows_the_first_choice() {
    let out = run(&["trace", &path("binder.hom"), &path("binder.lam"), "--eq", "1", "--choices", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let nodes: Vec<usize> = text.lines().map(|l| l.split('\t').nth(1).unwrap().parse().unwrap()).collect();
    let mut want: Vec<usize> = (1..=12).collect();
    want.push(12);
    assert_eq!(nodes, want);
    assert!(text.lines().last().unwrap().contains("q[E]"));
}

#[test]
fn bound_of_the_binder_problem() {
    let out = run(&["bound", &path("binder.hom")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l == "delta\t2"));
    assert!(text.lines().any(|l| l == "third-order bound\t5"));
}

#[test]
fn json_output_parses() {
    let out = run(&["--format", "json", "check", &path("binder.hom"), &path("binder.lam")]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["solves"], serde_json::Value::Bool(true));
    assert_eq!(v["oracle_agrees"], serde_json::Value::Bool(true));
}

#[test]
fn shrink_writes_a_smaller_solution() {
    let dir = std::env::temp_dir().join(format!("dualgame-shrink-{}", std::process::id()));
    let out = run(&["shrink", &path("twice.hom"), &path("twice.lam"), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&dir).unwrap();
    std::fs::remove_file(&dir).ok();
    let check = std::env::temp_dir().join(format!("dualgame-shrunk-{}.lam", std::process::id()));
    std::fs::write(&check, &written).unwrap();
    let again = run(&["--quiet", "check", &path("twice.hom"), check.to_str().unwrap()]);
    std::fs::remove_file(&check).ok();
    assert_eq!(again.status.code(), Some(0));
    assert!(again.stdout.is_empty());
}

#[test]
fn solve_finds_and_gives_up() {
    let ok = run(&["solve", &path("twice.hom"), "--max-size", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    let none = run(&["solve", &path("twice.hom"), "--max-size", "0"]);
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn tiles_saturate_extracts_a_solution() {
    let out = run(&["tiles", &path("twice.hom"), &path("twice.lam"), "--saturate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.starts_with("extraction\t") && l.ends_with("\tsolves")), "{}", text);
}

#[test]
fn fuzz_small_run_has_no_mismatches() {
    let out = run(&["fuzz", "--seed", "5", "--count", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("mismatches 0"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["check"]).status.code(), Some(2));
    assert_eq!(run(&["check", "/nonexistent.hom", "/nonexistent.lam"]).status.code(), Some(2));
}
