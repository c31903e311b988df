use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wedgelab")).args(args).output().expect("spawn wedgelab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wedgelab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn cp_of_g2_3() {
    let o = run(&["cp", "catalog:g2:3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "19/243");
}

#[test]
fn b0_json() {
    let o = run(&["b0", "catalog:e64", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["b0"]["type"], serde_json::json!([2]));
    assert_eq!(v["b0"]["engine"], "metab");
}

#[test]
fn b0_json_is_deterministic() {
    let a = run(&["b0", "catalog:gn:7", "--json"]);
    let b = run(&["b0", "catalog:gn:7", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["analyze", "nosuch:key"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "catalog:nosuch"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["b0", "catalog:e64", "--engine", "magic"]).status.code(), Some(2));
}

#[test]
fn engines_selectable() {
    for engine in ["tc", "metab", "auto"] {
        let o = run(&["b0", "catalog:q8", "--engine", engine, "--json"]);
        assert!(o.status.success(), "{engine}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["b0"]["type"], serde_json::json!([]), "{engine}");
    }
}

#[test]
fn tc_refuses_above_max_order() {
    let o = run(&["b0", "catalog:gn:7", "--engine", "tc", "--max-order", "64"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pcp_file_input() {
    let pcp = "group d4\ngens 3\norder g1 = 2\norder g2 = 2\norder g3 = 2\nconj g2 g1 = g2 g3\n";
    let p = scratch("d4.pcp", pcp);
    let o = run(&["census", &format!("file:{}", p.display())]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("k = 5"));
}

#[test]
fn class2_json_input() {
    let body = r#"{"p": 3, "rank": 2, "relations": []}"#;
    let p = scratch("heis.json", body);
    let o = run(&["schur", &format!("class2:{}", p.display()), "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m"]["type"], serde_json::json!([3, 3]));
}

#[test]
fn pairing_det12_verifies_det14_fails() {
    let good = scratch("det12.json", r#"{"p":3,"target_rank":1,"terms":[{"coord":0,"i":1,"j":2,"coeff":1}]}"#);
    let bad = scratch("det14.json", r#"{"p":3,"target_rank":1,"terms":[{"coord":0,"i":1,"j":4,"coeff":1}]}"#);
    let o = run(&["pairing", "catalog:g2:3", good.to_str().unwrap(), "--word", "(a w b)(c w d)^-1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("verified: true"), "{s}");
    assert!(s.contains("= [1]"), "{s}");
    let o = run(&["pairing", "catalog:g2:3", bad.to_str().unwrap()]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("verified: false") && s.contains("commuting_pair"), "{s}");
}

#[test]
fn reproduce_pairings_passes() {
    let o = run(&["reproduce", "pairings"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn analyze_report_json() {
    let o = run(&["analyze", "catalog:gn:7", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["k"], "26");
    assert_eq!(v["cp"]["num"], "13");
    assert!(v["verdicts"].as_array().unwrap().iter().all(|x| x["outcome"] != "counterexample!"));
}

#[test]
fn class2_json_relations() {
    let body = r#"{"name": "k9", "p": 3, "rank": 4, "relations": [[["a", "b"], ["c", "d"]]]}"#;
    let p = scratch("k9.json", body);
    let o = run(&["b0", &format!("class2:{}", p.display()), "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["b0"]["type"], serde_json::json!([3]));
}
