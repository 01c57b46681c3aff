use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn mq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mq")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = mq(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn error_json(out: &Output) -> serde_json::Value {
    assert_eq!(out.status.code(), Some(1));
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let p = path(dir, name);
    let mut all = vec!["generate", "--seed", "11", "-o", s(&p)];
    all.extend_from_slice(args);
    ok(&all);
    p
}

#[test]
fn recognizes_iterated_z3() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "z3.mqt", &["iterated", "--group", "Z3", "--arity", "3"]);
    assert!(ok(&["recognize", s(&f)]).starts_with("group: Z3\n"));
    let v: serde_json::Value = serde_json::from_str(&ok(&["recognize", "--json", s(&f)])).unwrap();
    assert_eq!(v["group"], "Z3");
    assert_eq!(v["isotopy"].as_array().unwrap().len(), 4);
}

#[test]
fn recognizes_scrambled_isotope() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "q8.mqt", &["isotope", "--group", "Q8", "--arity", "2"]);
    assert!(ok(&["recognize", s(&f)]).starts_with("group: Q8\n"));
}

#[test]
fn twisted_ternary_has_one_chord() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "tw.mqt", &["twisted", "--g1", "Z4", "--g2", "V4", "--beta", "0 1 2 3"]);
    assert!(ok(&["factor-graph", s(&f)]).starts_with("chords: (0,2)\n"));
    assert_eq!(ok(&["recognize", s(&f)]), "not an iterated group isotope\nchords: (0,2)\n");
    let dot = ok(&["factor-graph", "--dot", s(&f)]);
    assert!(dot.starts_with("graph factorization {") && dot.contains("v0 -- v2 [style=dashed]"));
}

#[test]
fn corrupted_file_reports_latin_violation() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "bad.mqt");
    std::fs::write(&f, "mq 2 3\n0 1 2\n0 2 1\n2 0 1\n").unwrap();
    let v = error_json(&mq(&["validate", s(&f)]));
    assert_eq!(v["error"], "LatinViolation");
    assert_eq!(v["position"], 1);
}

#[test]
fn other_domain_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(error_json(&mq(&["validate", s(&path(&dir, "missing.mqt"))]))["error"], "Io");
    let f = generate(&dir, "z2.mqt", &["iterated", "--group", "Z2", "--arity", "2"]);
    assert_eq!(error_json(&mq(&["eval", s(&f), "0"]))["error"], "ArityMismatch");
    assert_eq!(error_json(&mq(&["eval", s(&f), "0", "5"]))["error"], "ArgumentOutOfRange");
    let out = mq(&["generate", "--seed", "1", "iterated", "--group", "Z9", "--arity", "2"]);
    assert_eq!(error_json(&out)["error"], "UnknownGroup");
    let out = mq(&["generate", "--seed", "1", "--max-candidates", "3", "irreducible", "--arity", "3", "--order", "4"]);
    assert_eq!(error_json(&out)["error"], "BudgetExceeded");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mq(&["generate", "hypercube", "--arity", "2", "--order", "3"]).status.code(), Some(2));
    assert_eq!(mq(&["validate", "x.mqt", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(mq(&[]).status.code(), Some(2));
}

#[test]
fn version_names_formats() {
    let v = ok(&["--version"]);
    assert!(v.contains("mqt format 1") && v.contains("td format 1"), "{v}");
}

#[test]
fn eval_reads_the_table() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "z5.mqt", &["iterated", "--group", "Z5", "--arity", "3"]);
    assert_eq!(ok(&["eval", s(&f), "4", "3", "2"]), "4\n");
}

#[test]
fn generation_is_deterministic_and_thread_independent() {
    for kind in [
        vec!["hypercube", "--arity", "3", "--order", "5"],
        vec!["composition", "--arity", "5", "--order", "4"],
        vec!["nongroup", "--order", "6"],
        vec!["irreducible", "--arity", "3", "--order", "4"],
    ] {
        let mut one = vec!["--threads", "1", "generate", "--seed", "5"];
        one.extend(&kind);
        let mut many = vec!["--threads", "4", "generate", "--seed", "5"];
        many.extend(&kind);
        let a = ok(&one);
        assert_eq!(a, ok(&many), "{kind:?}");
        assert!(a.lines().nth(1).unwrap().starts_with("# generator "), "{a}");
    }
}

#[test]
fn generated_files_reread() {
    let dir = TempDir::new().unwrap();
    let nongroup = generate(&dir, "ng.mqt", &["nongroup", "--order", "5"]);
    assert!(ok(&["recognize", s(&nongroup)]).starts_with("not an iterated group isotope"));
    let irr = generate(&dir, "irr.mqt", &["irreducible", "--arity", "3", "--order", "4"]);
    assert_eq!(ok(&["factor-graph", s(&irr)]).lines().next(), Some("chords:"));
    for f in [&nongroup, &irr] {
        ok(&["validate", s(f)]);
    }
}

#[test]
fn compose_then_decompose() {
    let dir = TempDir::new().unwrap();
    let g = generate(&dir, "g.mqt", &["iterated", "--group", "V4", "--arity", "2"]);
    let h = generate(&dir, "h.mqt", &["twisted", "--g1", "Z4", "--g2", "V4", "--beta", "0 1 2 3"]);
    let f = path(&dir, "f.mqt");
    ok(&["compose", s(&g), s(&h), "--at", "2", "-o", s(&f)]);
    assert!(ok(&["validate", s(&f)]).starts_with("valid: arity 4, order 4"));
    let table = ok(&["decompose", s(&f)]);
    assert!(table.starts_with("block  kind"), "{table}");
    let tree: serde_json::Value = serde_json::from_str(&ok(&["decompose", "--json", s(&f)])).unwrap();
    assert_eq!(tree["arity"], 4);
    assert!(!tree["blocks"].as_array().unwrap().is_empty());
    assert!(ok(&["decompose", "--dot", s(&f)]).starts_with("graph decomposition {"));
    let out = mq(&["compose", s(&g), s(&h), "--at", "3"]);
    assert_eq!(error_json(&out)["error"], "PositionOutOfRange");
}

#[test]
fn design_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "z3.mqt", &["iterated", "--group", "Z3", "--arity", "3"]);
    let td = path(&dir, "z3.td");
    ok(&["design", s(&f), "-o", s(&td)]);
    let text = std::fs::read_to_string(&td).unwrap();
    assert!(text.starts_with("td 4 3 3 1\n"));
    assert_eq!(text.lines().count(), 28);
    assert_eq!(ok(&["design", s(&td)]), "valid: TD with 4 classes of size 3, strength 3, index 1, 27 blocks\n");

    let broken = path(&dir, "broken.td");
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    std::fs::write(&broken, lines.join("\n") + "\n").unwrap();
    let v = error_json(&mq(&["design", s(&broken)]));
    assert_eq!(v["error"], "InvalidDesign");
}

#[test]
fn enumerate_counts_and_writes() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "all");
    assert_eq!(ok(&["enumerate", "--arity", "3", "--order", "3", "--out-dir", s(&out)]), "count: 24\n");
    let files: Vec<_> = std::fs::read_dir(&out).unwrap().collect();
    assert_eq!(files.len(), 24);
    assert!(ok(&["recognize", s(&out.join("000023.mqt"))]).starts_with("group: Z3"));
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["--json", "enumerate", "--arity", "2", "--order", "4"])).unwrap();
    assert_eq!(v["count"], 576);
    let err = error_json(&mq(&["enumerate", "--arity", "4", "--order", "5", "--limit", "100"]));
    assert_eq!(err["error"], "BudgetExceeded");
}
