use std::path::Path;
use std::process::{Command, Output};

use gammaring::format::GrdfDocument;
use gammaring::{FiniteAbelianGroup, GammaRing};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gammaring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_doc(dir: &Path, name: &str, doc: &GrdfDocument) -> String {
    let path = dir.join(name);
    std::fs::write(&path, doc.to_canonical_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn trivial_z4() -> GrdfDocument {
    let r = GammaRing::trivial(
        FiniteAbelianGroup::from_factors(&[4]).unwrap(),
        FiniteAbelianGroup::from_factors(&[2]).unwrap(),
    )
    .unwrap();
    GrdfDocument::from_ring(&r)
}

fn matrix_doc() -> GrdfDocument {
    GrdfDocument::parse(r#"{"product": {"type": "matrix", "mod": 2, "rows": 2, "cols": 2}}"#).unwrap()
}

#[test]
fn matrix_axioms_pass() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_doc(dir.path(), "m.json", &matrix_doc());
    let out = run(&["axioms", "--input", &p, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["barnes_passed"], true);
}

#[test]
fn trivial_ring_breaks_required_additivity() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_doc(dir.path(), "z4.json", &trivial_z4());
    let out = run(&["search-iso", "--input", &p, "--require-additive", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["result"]["count"], 12);
    assert_eq!(v["result"]["additive_count"], 4);
    assert!(v["result"]["non_additive_witness"].is_object());

    let relaxed = run(&["search-iso", "--input", &p]);
    assert_eq!(relaxed.status.code(), Some(0));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"product\": ").unwrap();
    let out = run(&["axioms", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let missing = run(&["axioms", "--input", dir.path().join("none.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));

    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn table_size_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("short.json");
    std::fs::write(
        &p,
        r#"{"m_group": {"invariants": [2]}, "gamma_group": {"invariants": [2]},
            "product": {"type": "table", "entries": [[[0, 0]]]}}"#,
    )
    .unwrap();
    let out = run(&["axioms", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theorem_on_identity_confirms() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = matrix_doc();
    let r = doc.ring().unwrap();
    doc.frames = GrdfDocument::parse(
        r#"{"product": {"type": "matrix", "mod": 2, "rows": 2, "cols": 2},
            "frames": [{"e": 1, "gamma1": 7, "mode": "canonical"}]}"#,
    )
    .unwrap()
    .frames;
    doc.maps = vec![gammaring::format::MapSpec {
        phi: (0..r.m_order()).collect(),
        psi: (0..r.gamma_order()).collect(),
    }];
    doc.derivations = vec![gammaring::format::DerivationSpec { d: vec![0; r.m_order()] }];
    let p = write_doc(dir.path(), "t.json", &doc);
    let out = run(&["theorem", "--input", &p, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["result"]["maps"][0]["conclusion"]["status"], "confirmed");
    assert_eq!(v["result"]["derivations"][0]["defect_is_zero"], true);

    let empty = write_doc(dir.path(), "e.json", &matrix_doc());
    assert_eq!(run(&["theorem", "--input", &empty]).status.code(), Some(2));
}

#[test]
fn theorem_fails_preconditions_on_trivial_ring() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = trivial_z4();
    doc.maps = vec![gammaring::format::MapSpec { phi: vec![0, 1, 3, 2], psi: vec![0, 1] }];
    let p = write_doc(dir.path(), "z4.json", &doc);
    let out = run(&["theorem", "--input", &p, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["result"]["maps"][0]["conclusion"]["status"], "precondition-failed");
    assert_eq!(v["result"]["maps"][0]["additive"]["passed"], false);
}

#[test]
fn verify_iso_reports_product_failures() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = matrix_doc();
    let r = doc.ring().unwrap();
    let mut phi: Vec<usize> = (0..r.m_order()).collect();
    phi.swap(1, 2);
    doc.maps = vec![gammaring::format::MapSpec { phi, psi: (0..r.gamma_order()).collect() }];
    let p = write_doc(dir.path(), "v.json", &doc);
    let out = run(&["verify-iso", "--input", &p, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let w = &v["result"]["maps"][0]["multiplicative"]["witness"];
    assert_eq!(w["tuple"].as_array().unwrap().len(), 3);
    assert!(w["rendered"][0].as_str().unwrap().starts_with("M:"));
    assert!(w["rendered"][1].as_str().unwrap().starts_with("G:"));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_doc(dir.path(), "m.json", &matrix_doc());
    for cmd in ["conditions", "search-iso", "idempotents", "peirce"] {
        let a = run(&[cmd, "--input", &p, "--format", "json"]);
        let b = run(&[cmd, "--input", &p, "--format", "json"]);
        assert_eq!(a.status.code(), Some(0), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        let t1 = run(&[cmd, "--input", &p]);
        let t2 = run(&[cmd, "--input", &p]);
        assert_eq!(t1.stdout, t2.stdout, "{cmd}");
    }
}

#[test]
fn canonical_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let doc = matrix_doc();
    let p = write_doc(dir.path(), "m.json", &doc);
    let text = std::fs::read_to_string(&p).unwrap();
    let again = GrdfDocument::parse(&text).unwrap().to_canonical_string();
    assert_eq!(text, again);
}

#[test]
fn tiny_budget_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_doc(dir.path(), "m.json", &matrix_doc());
    let out = run(&["search-iso", "--input", &p, "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn small_hunt_finds_no_violation() {
    let out = run(&["hunt", "--family", "trivial", "--max-order", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["violations"], 0);
    assert_eq!(v["result"]["entries"].as_array().unwrap().len(), 4);
}
