use std::path::PathBuf;
use std::process::Command;

use finitary::{parse_model, serialize_model};
use serde_json::Value;

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["finitary"];
    argv.extend_from_slice(args);
    let code = finitary_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn differing_hmms_exit_one_with_witness() {
    let (code, out, _) = run(&["equiv", &model("coin.hmm"), &model("biased.hmm")]);
    assert_eq!(code, 1);
    assert!(out.starts_with("not equivalent (exact)"));
    assert!(out.contains("witness: a\n"));
    assert!(out.contains("values: 1/2 1/3\n"));
}

#[test]
fn equivalent_hmms_exit_zero() {
    let (code, out, _) = run(&["equiv", &model("always_a_2state.hmm"), &model("always_a_1state.hmm")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("dims: 1 1"));
}

#[test]
fn missing_file_exits_two() {
    let (code, out, err) = run(&["equiv", &model("missing.hmm"), &model("coin.hmm")]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.starts_with("error:"));
}

#[test]
fn bad_tolerance_exits_two() {
    let (code, _, _) = run(&["dim", "--tolerance", "0", &model("coin.hmm")]);
    assert_eq!(code, 2);
}

#[test]
fn mixed_classes_are_rejected() {
    let (code, _, _) = run(&["equiv", &model("coin.hmm"), &model("geometric.pfa")]);
    assert_eq!(code, 2);
}

#[test]
fn dim_and_prob() {
    assert_eq!(run(&["dim", &model("coin.hmm")]).1, "1\n");
    assert_eq!(run(&["prob", &model("coin.hmm"), "ab"]).1, "1/4\n");
    assert_eq!(run(&["prob", &model("geometric.pfa"), "b"]).1, "1/8\n");
}

#[test]
fn basis_text() {
    let (code, out, _) = run(&["basis", &model("always_a_2state.hmm")]);
    assert_eq!(code, 0);
    assert_eq!(out, "dim: 1\nI: □\nJ: □\nP:\n  1\n");
}

#[test]
fn equiv_json() {
    let (code, out, _) = run(&["equiv", "--format", "json", &model("coin.hmm"), &model("biased.hmm")]);
    assert_eq!(code, 1);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["schema"], "finitary.equiv.v1");
    assert_eq!(doc["equivalent"], false);
    assert_eq!(doc["witness"], "a");
    assert_eq!(doc["values"][0], "1/2");
}

#[test]
fn automata_report_an_accepted_word() {
    let (code, out, _) = run(&["equiv", &model("geometric.pfa"), &model("geometric_shifted.pfa")]);
    assert_eq!(code, 1);
    assert!(out.contains("accepted-word witness: b\n"), "{out}");
    assert!(out.contains("acceptance: 1/8 1/16\n"));
    let (code, _, _) = run(&["equiv", &model("geometric.pfa"), &model("geometric_swapped.pfa")]);
    assert_eq!(code, 0);
}

#[test]
fn oracle_agrees_on_corpus_pair() {
    let (code, out, _) = run(&["oracle", &model("coin.hmm"), &model("biased.hmm"), "-L", "2"]);
    assert_eq!(code, 1);
    assert!(out.contains("differ at a"));
}

#[test]
fn corpus_serializes_to_itself() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = parse_model(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(serialize_model(&parsed), text, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 10);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_finitary");
    let status = Command::new(bin).args(["validate", &model("swap.qrw")]).output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    let status = Command::new(bin).args(["equiv", &model("coin.hmm"), &model("biased.hmm")]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    let status = Command::new(bin).arg("no-such-command").output().unwrap();
    assert_eq!(status.status.code(), Some(2));
}
