use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_spanex"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn extract_from_stdin() {
    let o = run(&["extract", "-e", "x{a*} y{b*}", "-"], "aaabbb");
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), r#"{"x":[1,4],"y":[4,7]}"#);
    let summary: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(summary["count"], 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["extract", "-e", "x{a", "-"], "a").status.code(), Some(2));
    assert_eq!(run(&["extract", "-e", "x{b}", "-"], "a").status.code(), Some(4));
    assert_eq!(run(&["extract", "-e", "x && x.(a) && x.(b)", "--kind", "rule", "-"], "a").status.code(), Some(3));
}

#[test]
fn transform_tree_rule() {
    let o = run(&["transform", "-e", "(a x b y) && x.(abc z) && y.(@*) && z.(d)", "--kind", "rule", "--alphabet", "abcd", "--to", "rgx"], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["output"], "a x{abc z{d}} b y{@*}");
}

#[test]
fn containment_counterexample() {
    let o = run(&["analyze", "contains", "x{a} @*", "x{a}", "--inline"], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["result"], "counterexample");
    assert_eq!(v["witness"]["mapping"]["x"], serde_json::json!([1, 2]));
}

#[test]
fn audit_reports_bounds() {
    let o = run(&["audit", "-e", "x{a*} y{b*}", "-"], "aaabbb");
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["quadratic_bound"], 74);
    assert_eq!(v["within_quadratic_bound"], true);
}
