use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn gq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gq")).args(args).output().expect("gq runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

fn batch_file(commands: &[&str]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{}", serde_json::to_string(commands).unwrap()).unwrap();
    f
}

#[test]
fn eval_examples() {
    for (input, expected) in [
        ("V(alpha(3/2))", "3/2"),
        ("i*j - j*i", "2k"),
        ("bezout(e^1 * i, e^2 * j)", "e^2 + e^4"),
        ("let a = chi(pre=;per=10); a*a == a", "true"),
    ] {
        let out = gq(&["eval", input]);
        assert!(out.status.success(), "{input}");
        assert_eq!(stdout(&out), expected, "{input}");
    }
}

#[test]
fn eval_json_and_errors() {
    let out = gq(&["--json", "eval", "invert(chi(pre=;per=10))"]);
    assert_eq!(out.status.code(), Some(1));
    let j: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(j["ok"], false);
    assert_eq!(j["error"]["kind"], "NotInvertible");
    assert_eq!(j["error"]["subexpression"], "invert(chi(pre=;per=10))");

    let out = gq(&["--json", "eval", "V(e^2 + e^3)"]);
    let j: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(j["result"]["type"], "valuation");
    assert_eq!(j["result"]["value"], "2");
}

#[test]
fn order_flag_controls_division() {
    let low = stdout(&gq(&["--order", "2", "eval", "1 / (1 + e)"]));
    let high = stdout(&gq(&["eval", "1 / (1 + e)"]));
    assert_eq!(low, "1 - e^1 + e^2 + O(e^3)");
    assert!(high.ends_with("O(e^9)"), "{high}");
}

#[test]
fn batch_with_one_error() {
    let f = batch_file(&["1 + 1", "invert(0)", "i * i"]);
    let out = gq(&["batch", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let j: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = j.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["result"]["text"], "2");
    assert_eq!(rows[1]["ok"], false);
    assert_eq!(rows[1]["error"]["kind"], "ZeroInput");
    assert_eq!(rows[2]["result"]["text"], "-1");
}

#[test]
fn empty_batch() {
    let f = batch_file(&[]);
    let out = gq(&["batch", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let j: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(j, Value::Array(vec![]));
}

#[test]
fn repl_keeps_bindings() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gq"))
        .arg("repl")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"let a = chi(pre=;per=10)\na*a == a\nlet x = 1 + i\nx * conj(x)\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let lines: Vec<_> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines, ["{pre=;per=01 : 0 | pre=;per=10 : 1}", "true", "1 + i", "2"]);
}

#[test]
fn oracle_summary() {
    let out = gq(&["oracle", "--seed", "7", "--trials", "20"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("100 checks"), "{text}");
    assert!(text.contains("0 mismatches"), "{text}");
}

#[test]
fn error_names_are_visible() {
    for (input, kind) in [
        ("sqrt(-1)", "NotQPositive"),
        ("invert(0)", "ZeroInput"),
        ("invert(chi(pre=;per=10))", "NotInvertible"),
        ("V(O(e^1) - O(e^1) + e^2)", "IndeterminateAtPrecision"),
        ("{pre=;per=10 : 1}", "InvalidPartition"),
        ("1 + * 2", "ParseError"),
    ] {
        let out = gq(&["eval", input]);
        assert_eq!(out.status.code(), Some(1), "{input}");
        let text = stdout(&out);
        assert!(text.contains(kind), "{input}: {text}");
    }
}
