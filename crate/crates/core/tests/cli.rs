use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn storsion(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_storsion")).args(args).current_dir(dir).env_remove("STORSION_DEFAULT_PREFIX").output().unwrap()
}

fn files(pairs: &[(&str, &str)]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in pairs {
        fs::write(dir.path().join(name), body).unwrap();
    }
    dir
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn check_exits_zero_on_a_decided_verdict() {
    let d = files(&[("q2.json", r#"{"type":"constant_ratio","q":2}"#), ("x.json", r#"{"type":"rational","num":1,"den":3}"#)]);
    let o = storsion(&["check", "--seq", "q2.json", "--x", "x.json", "--prefix", "5000", "--threshold", "0.01", "--eps-grid", "0.1,0.02"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["outcome"], "NonMember");
}

#[test]
fn oracle_on_one_half() {
    let d = files(&[("q2.json", r#"{"type":"constant_ratio","q":2}"#), ("x.json", r#"{"type":"rational","num":1,"den":2}"#)]);
    let o = storsion(&["oracle", "--seq", "q2.json", "--x", "x.json", "--prefix", "1000"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"], "ConvergesEvidence");
    let csv = storsion(&["oracle", "--seq", "q2.json", "--x", "x.json", "--prefix", "3", "--format", "csv"], d.path());
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,frac_low,frac_high,exceptional_1_10,exceptional_1_4"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn classify_reports_the_dyadic_rule_as_not_d_splitting() {
    let d = files(&[("s.json", r#"{"type":"example_2_7"}"#)]);
    let o = storsion(&["classify-seq", "--seq", "s.json", "--prefix", "20000"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["d_splitting"]["verdict"], "Fails");
    assert_eq!(v["witness"], serde_json::Value::Null);
    assert_eq!(v["level_sets"][0]["value"], 2);
}

#[test]
fn inconclusive_oracle_exits_two() {
    // mixed per-eps outcomes: one exceptional index per square at 0.45, several at 0.01
    let d = files(&[
        ("q2.json", r#"{"type":"constant_ratio","q":2}"#),
        ("x.json", r#"{"type":"digit_element","rule":{"type":"indicator","support":{"type":"squares"},"value":"one"}}"#),
    ]);
    let o = storsion(&["oracle", "--seq", "q2.json", "--x", "x.json", "--prefix", "100000", "--eps-grid", "0.45,0.01"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["verdict"], "Inconclusive");
}

#[test]
fn malformed_specs_give_structured_errors() {
    let d = files(&[
        ("bad.json", r#"{"type":"table_tail","prefix":[2,3],"tail":{"type":"constant_ratio","q":-1}}"#),
        ("x.json", r#"{"type":"rational","num":1,"den":3}"#),
    ]);
    let o = storsion(&["check", "--seq", "bad.json", "--x", "x.json"], d.path());
    assert_eq!(o.status.code(), Some(1));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "malformed_spec");
    assert_eq!(e["location"], "/tail/q");

    let o = storsion(&["check", "--seq", "missing.json", "--x", "x.json"], d.path());
    assert_eq!(o.status.code(), Some(1));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "io");

    let o = storsion(&["check", "--seq", "bad.json", "--x", "x.json", "--threshold", "2"], d.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn prefix_defaults_from_the_environment() {
    let d = files(&[("q2.json", r#"{"type":"constant_ratio","q":2}"#), ("x.json", r#"{"type":"rational","num":1,"den":3}"#)]);
    let o = Command::new(env!("CARGO_BIN_EXE_storsion"))
        .args(["expand", "--seq", "q2.json", "--x", "x.json"])
        .current_dir(d.path())
        .env("STORSION_DEFAULT_PREFIX", "12")
        .output()
        .unwrap();
    assert_eq!(json(&o)["n_max"], 12);
    assert_eq!(json(&o)["digits"].as_array().unwrap().len(), 12);
}

#[test]
fn density_of_a_set_spec() {
    let d = files(&[("s.json", r#"{"type":"ap","start":2,"step":2}"#), ("w.json", r#"{"type":"residues","modulus":3,"residues":[0]}"#)]);
    let o = storsion(&["density", "--set", "s.json", "--prefix", "600"], d.path());
    let v = json(&o);
    assert_eq!(v["estimate"]["count"], 300);
    assert_eq!(v["estimate"]["exact"], serde_json::json!({"num": "1", "den": "2"}));
    let o = storsion(&["density", "--set", "s.json", "--within", "w.json", "--prefix", "600"], d.path());
    assert_eq!(json(&o)["estimate"]["count"], 100);
}

#[test]
fn compare_writes_a_trace() {
    let d = files(&[("q2.json", r#"{"type":"constant_ratio","q":2}"#), ("x.json", r#"{"type":"rational","num":1,"den":2}"#)]);
    let o = storsion(&["compare", "--seq", "q2.json", "--x", "x.json", "--prefix", "2000", "--trace", "t.csv"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["agree"], true);
    assert_eq!(fs::read_to_string(d.path().join("t.csv")).unwrap().lines().count(), 2001);
}

#[test]
fn corpus_manifest_lists_every_pair() {
    let d = tempfile::tempdir().unwrap();
    let o = storsion(&["corpus", "--seed", "42", "--size", "10", "--output", "c"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("c/manifest.json")).unwrap()).unwrap();
    let entries = m["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 10);
    for e in entries {
        assert!(d.path().join("c").join(e["seq_file"].as_str().unwrap()).exists());
        assert!(d.path().join("c").join(e["x_file"].as_str().unwrap()).exists());
    }
}
