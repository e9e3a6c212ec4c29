//! End-to-end checks of the `subshift` binary and the spec file format.

use std::path::PathBuf;
use std::process::{Command, Output};

use subshift::cli::{emit_spec, parse_spec, parse_spec_str};

fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subshift")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn count_full_shift_row() {
    let spec = spec_path("full2.sft");
    let out = run(&["count", "--spec", spec.to_str().unwrap(), "--n", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().any(|l| l == "9,10,1024,1.000000000000"), "{}", stdout(&out));
}

#[test]
fn count_golden_mean_matches_fibonacci() {
    let spec = spec_path("golden_mean.sft");
    let out = run(&["count", "--spec", spec.to_str().unwrap(), "--n", "18"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().any(|l| l.starts_with("18,19,10946,")), "{}", stdout(&out));
}

#[test]
fn empty_subshift_is_a_computation_error() {
    let spec = spec_path("empty.sft");
    let out = run(&["count", "--spec", spec.to_str().unwrap(), "--n", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty subshift"));
}

#[test]
fn verify_golden_mean_passes() {
    let spec = spec_path("golden_mean.sft");
    let out = run(&["verify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn malformed_spec_exits_with_spec_error() {
    let dir = std::env::temp_dir().join(format!("subshift-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.sft");
    std::fs::write(&path, "alphabet: 0 1\ngroup: N\ndimension: 1\nforbidden:\n(0)=2\n").unwrap();
    let out = run(&["count", "--spec", path.to_str().unwrap(), "--n", "2"]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_arguments_are_usage_errors() {
    assert_eq!(run(&["count"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn shipped_specs_round_trip() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let spec = parse_spec(&path).unwrap();
        let emitted = emit_spec(&spec);
        assert_eq!(parse_spec_str(&emitted).unwrap(), spec, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 6);
}
