use std::path::PathBuf;
use std::process::Command;

use opuntia::cli::{run, EXIT_BUDGET, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};
use proptest::prelude::*;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn opuntia(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("opuntia").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut v = args.to_vec();
    v.push("--json");
    let (code, out, _) = opuntia(&v);
    (code, serde_json::from_str(&out).unwrap_or(Value::Null))
}

#[test]
fn validate_documents() {
    let (code, v) = json(&["validate", "--input", &fixture("z2-z3.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["payload"]["s1"]["combinatorial"], false);
    assert_eq!(v["payload"]["s2"]["combinatorial"], false);
    let (code, v) = json(&["validate", "--input", &fixture("invalid-not-associative.json")]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(v["error"]["kind"], "NotAssociative");
    let (code, v) = json(&["validate", "--input", &fixture("invalid-not-injective.json")]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(v["error"]["kind"], "NotInjective");
}

#[test]
fn query_examples() {
    let doc = fixture("z2-z3.json");
    let (code, out, _) = opuntia(&["wordeq", "aa", "bbb", "--input", &doc]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "true\n"));
    let (_, v) = json(&["maxgroup", "a", "--input", &doc]);
    assert_eq!(v["summary"], "< a, b | a^2, b^3 >");
    assert_eq!(v["payload"]["finiteness"]["verdict"], "Infinite");
    assert_eq!(v["diagnostics"]["discrepancy"], true);
    let (_, v) = json(&["classify", "f1", "--input", &fixture("chain2.json")]);
    assert_eq!(v["summary"], "Finite");
    let (_, v) = json(&["sgraph", "2", "b", "--corpus", "z2-z3"]);
    assert_eq!(v["summary"], 3);
    let (code, _) = json(&["sgraph", "1", "b", "--corpus", "z2-z3"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn exit_codes() {
    let (code, _, err) = opuntia(&["core", "q", "--corpus", "z2-z3"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("unknown"));
    assert_eq!(opuntia(&["core", "a"]).0, EXIT_INPUT);
    assert_eq!(opuntia(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(opuntia(&["expand", "a", "3", "--corpus", "z2-z3", "--max-lobes", "2"]).0, EXIT_BUDGET);
    assert_eq!(opuntia(&["expand", "a", "3", "--corpus", "z2-z3", "--max-edges", "4"]).0, EXIT_BUDGET);
    assert_eq!(opuntia(&["--help"]).0, EXIT_OK);
}

#[test]
fn batch_manifests() {
    let (code, out, _) = opuntia(&["batch", &fixture("manifest.json")]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, v) = json(&["batch", &fixture("mismatch.json")]);
    assert_eq!(code, EXIT_MISMATCH);
    assert_eq!(v["mismatches"], 1);
    assert_eq!(v["items"][1]["status"], "mismatch");
    let (code, v) = json(&["batch", &fixture("empty.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["items"].as_array().map(Vec::len), Some(0));
}

#[test]
fn batch_report_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"queries": [
            {"document": "corpus:z2-z3", "command": "wordeq", "args": ["a", "a"], "expect": true},
            {"document": "missing.json", "command": "core", "args": ["a"]}
        ]}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let (code, _, _) = opuntia(&["batch", manifest.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!((v["ok"].clone(), v["errors"].clone()), (Value::from(1), Value::from(1)));
    assert_eq!(v["items"][1]["error"]["kind"], "Document");
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["maxgroup", "a", "--corpus", "z2-z3", "--json"],
        vec!["expand", "a", "2", "--corpus", "z2-z3", "--json"],
        vec!["hosts", "x", "--corpus", "i2-i2", "--json"],
        vec!["batch", "--json"],
    ] {
        let mut args: Vec<String> = args.into_iter().map(String::from).collect();
        if args[0] == "batch" {
            args.insert(1, fixture("manifest.json"));
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = opuntia(&refs);
        assert_eq!(first, opuntia(&refs));
    }
}

#[test]
fn dot_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(opuntia(&["core", "a", "--corpus", "z2-z3", "--dot", d]).0, EXIT_OK);
    assert_eq!(opuntia(&["maxgroup", "a", "--corpus", "z2-z3", "--dot", d]).0, EXIT_OK);
    let core = std::fs::read_to_string(dir.path().join("core.dot")).unwrap();
    assert!(core.starts_with("digraph"));
    let y = std::fs::read_to_string(dir.path().join("y.dot")).unwrap();
    assert_eq!(y.matches("->").count(), 1);
    let (code, out, _) = opuntia(&["export-dot", "sgraph2", "b", "--corpus", "z2-z3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.matches("->").count(), 3);
    assert_eq!(opuntia(&["export-dot", "y", "e1", "--corpus", "chain2"]).0, EXIT_INPUT);
}

#[test]
fn corpus_command_emits_loadable_documents() {
    let (code, out, _) = opuntia(&["corpus"]);
    assert_eq!(code, EXIT_OK);
    let dir = tempfile::tempdir().unwrap();
    for name in out.lines() {
        let (_, doc, _) = opuntia(&["corpus", name]);
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, doc).unwrap();
        assert_eq!(opuntia(&["validate", "--input", path.to_str().unwrap()]).0, EXIT_OK, "{name}");
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_opuntia");
    let status = Command::new(bin).args(["wordeq", "aa", "bbb", "--corpus", "z2-z3"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&status.stdout), "true\n");
    let status = Command::new(bin).args(["batch", &fixture("mismatch.json")]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_MISMATCH));
    let status = Command::new(bin).args(["validate", "--input", &fixture("invalid-not-associative.json")]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INPUT));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn malformed_documents_get_structured_errors(cut in 0usize..600, byte in 0u8..128, pos in 0usize..600) {
        let text = std::fs::read_to_string(fixture("i2-z2.json")).unwrap();
        let mut bytes = text.into_bytes();
        let p = pos % bytes.len();
        bytes[p] = byte;
        bytes.truncate(bytes.len() - cut % bytes.len());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("doc.json");
        std::fs::write(&path, &bytes).unwrap();
        let (code, v) = json(&["validate", "--input", path.to_str().unwrap()]);
        prop_assert!(code == EXIT_OK || code == EXIT_INPUT);
        if code == EXIT_INPUT {
            prop_assert_eq!(&v["status"], "error");
            prop_assert!(v["error"]["kind"].is_string());
        }
    }
}
