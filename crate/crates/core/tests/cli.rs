use std::process::Command;

use serde_json::Value;

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/corpus.txt");

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_spinorsel")).args(args).output().expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().expect("exit code"), json)
}

fn with_corpus<'a>(index: &'a str, args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--order", CORPUS, "--index", index]);
    v
}

#[test]
fn ramification_envelope() {
    let (code, v) = run(&["ramification", "-1", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["result"]["ramified"], serde_json::json!([2, "INF"]));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"]["name"], "ramification");
    let (code, v) = run(&["ramification", "0", "3"]);
    assert_eq!((code, &v["error"]["kind"]), (1, &Value::from("INVALID_INPUT")));
}

#[test]
fn selective_bass_order() {
    let (code, v) = run(&with_corpus("8", &["selectivity", "--b", "-3,1"]));
    assert_eq!(code, 0);
    let report = &v["result"][0]["report"];
    assert_eq!(report["selective"], true);
    assert_eq!(report["S"], serde_json::json!([3]));
}

#[test]
fn trace_and_spinor_trace_pass() {
    for (index, b) in [("0", "-1,1"), ("2", "-1,1"), ("8", "-3,1")] {
        for cmd in ["trace", "spinor-trace"] {
            let (code, v) = run(&with_corpus(index, &[cmd, "--b", b]));
            assert_eq!(code, 0, "{cmd} {index} {b}: {v}");
            assert_eq!(v["result"][0]["report"]["pass"], true);
        }
    }
}

#[test]
fn error_exit_codes() {
    let (code, v) = run(&with_corpus("2", &["selectivity", "--b", "-15,1"]));
    assert_eq!((code, &v["error"]["kind"]), (1, &Value::from("NOT_EMBEDDABLE")));
    let (code, v) = run(&["selectivity", "--b", "-1,1"]);
    assert_eq!((code, &v["status"]), (1, &Value::from("ERROR")));
    let (code, v) = run(&with_corpus("1", &["trace", "--b", "-1,2", "--precision", "1"]));
    assert_eq!((code, &v["error"]["kind"]), (2, &Value::from("PRECISION_UNSTABLE")));
    let (code, _) = run(&["dpinf", "13"]);
    assert_eq!(code, 1);
    let (code, _) = run(&["no-such-command"]);
    assert_eq!(code, 1);
}

#[test]
fn out_file_and_pretty_view() {
    let dir = std::env::temp_dir().join(format!("spinorsel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dpinf.json");
    let (code, _) = run(&["dpinf", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["embeddingTypes"], 1);
    let out = Command::new(env!("CARGO_BIN_EXE_spinorsel")).args(["dpinf", "7", "--pretty"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.trim_start().starts_with("embeddingTypes") && l.trim_end().ends_with('1')));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn corpus_order_info() {
    let (code, v) = run(&["order-info", "--order", CORPUS]);
    assert_eq!(code, 0);
    let entries = v["result"].as_array().unwrap();
    assert_eq!(entries.len(), 10);
    let hurwitz = &entries[0];
    assert_eq!((hurwitz["disc"].as_str(), hurwitz["maximal"].as_bool()), (Some("2"), Some(true)));
    let bass = &entries[8];
    assert_eq!(bass["spinorGenusField"], serde_json::json!([-3]));
    assert_eq!(bass["spinorClassNumber"], 2);
}
