mod common;

use std::process::{Command, Output};

use common::fixture_path;

fn eb2jml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eb2jml"))
        .args(args)
        .env_remove("EB2JML_CEILING")
        .output()
        .unwrap()
}

fn fx(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn parse_prints_canonical_text() {
    let o = eb2jml(&["parse", &fx("counter.ebm")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("machine counter\n"));
    let again = eb2jml::eventb::parse_machine(&text).unwrap();
    assert_eq!(eb2jml::eventb::render_machine(&again), text);
}

#[test]
fn missing_file_exits_two_and_names_it() {
    let o = eb2jml(&["check", "/no/such/dir/machine.ebm"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/dir/machine.ebm"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn empty_file_expects_machine_keyword() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.ebm");
    std::fs::write(&p, "").unwrap();
    let o = eb2jml(&["parse", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("expected keyword `machine`"), "{}", stderr(&o));
}

#[test]
fn ill_formed_machine_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.ebm");
    std::fs::write(
        &p,
        "machine bad variables v invariants i: v : INT events initialisation begin end end",
    )
    .unwrap();
    let o = eb2jml(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not assigned by the initialisation"));
}

#[test]
fn translate_writes_named_class_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_eb2jml"))
        .args(["translate", &fx("counter.ebm")])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let java = std::fs::read_to_string(dir.path().join("counter.java")).unwrap();
    assert!(java.contains("public abstract void run_inc();"));
    let out = stdout(&o);
    assert!(out.contains("wrote counter.java"));
    assert!(out.contains("->"));
}

#[test]
fn translate_honours_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("Out.java");
    let o = eb2jml(&["translate", &fx("swap.ebm"), "-o", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&p).unwrap().contains("run_swap"));
}

#[test]
fn flagship_check_passes() {
    let o = eb2jml(&[
        "check",
        &fx("social.ebm"),
        "--carrier",
        "PERSON=2",
        "--carrier",
        "CONTENTS=2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("overall: PASS"));
}

#[test]
fn small_ceiling_is_a_resource_limit() {
    let o = eb2jml(&["check", &fx("social.ebm"), "--ceiling", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("RESOURCE_LIMIT"));
}

#[test]
fn ceiling_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_eb2jml"))
        .args(["check", &fx("social.ebm")])
        .env("EB2JML_CEILING", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tree_format_is_json() {
    let o = eb2jml(&["check", &fx("swap.ebm"), "--int-range", "0..1", "--format", "tree"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["machine"], "swap");
    assert_eq!(v["events"][0]["verdict"]["jml_pairs"], 4);
}

#[test]
fn report_can_go_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.txt");
    let o = eb2jml(&["check", &fx("counter.ebm"), "-o", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert!(std::fs::read_to_string(&p).unwrap().contains("event inc: PASS"));
}

#[test]
fn bad_flag_values_exit_two() {
    let f = fx("counter.ebm");
    for args in [
        vec!["check", f.as_str(), "--int-range", "3..1"],
        vec!["check", f.as_str(), "--carrier", "PERSON"],
        vec!["check", f.as_str(), "--ceiling", "0"],
        vec!["check", f.as_str(), "--format", "xml"],
    ] {
        let o = eb2jml(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}
