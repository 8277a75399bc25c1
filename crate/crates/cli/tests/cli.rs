use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use braidmu::examples_io::Bundle;
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidmu")).current_dir(dir).args(args).output().expect("spawn braidmu")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn corpus(name: &str) -> String {
    format!("{}/../core/tests/corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Every pass flag must follow from the recorded value, target and tolerance.
fn assert_rederivable(checks: &Value) {
    for c in checks.as_array().unwrap() {
        let value = c["value"].as_f64().unwrap();
        let derived = match c["kind"].as_str().unwrap() {
            "residual" => value < c["tol"].as_f64().unwrap(),
            _ => Some(value) == c["target"].as_f64(),
        };
        assert_eq!(derived, c["pass"].as_bool().unwrap(), "check {}", c["name"]);
    }
}

#[test]
fn generated_kac_takesaki_reloads_and_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["generate", "kac-takesaki", "--group", "Zn", "--n", "4", "-o", "w.json"]);
    assert_eq!(code(&o), 0);
    let bundle = Bundle::from_json(&std::fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    let w = bundle.mult_unitary("W").unwrap();
    assert_eq!(w.dim(), 4);
    assert!(w.full_certificate(1e-9).unwrap().pass);
}

#[test]
fn generated_super_bundle_uses_the_sign_braiding() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["generate", "super", "--dim", "2", "-o", "s.json"])), 0);
    let v = json(dir.path().join("s.json"));
    assert_eq!(v["braiding"]["kind"], "phase");
    assert_eq!(v["braiding"]["modulus"], 2);
    assert_eq!(v["spaces"]["L"]["grading"], serde_json::json!([0, 1]));
}

#[test]
fn unknown_kind_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["generate", "quantum-torus", "-o", "x.json"]);
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn analyze_z2_passes_with_full_rank() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "kac-takesaki", "--n", "2", "-o", "w.json"]);
    let o = run(dir.path(), &["analyze", "w.json", "--object", "W", "--report", "r.json"]);
    assert_eq!(code(&o), 0);
    let r = json(dir.path().join("r.json"));
    assert_eq!(r["pass"], true);
    assert_eq!(r["certificate"]["regularity"]["rank_c"], 4);
    assert_eq!(r["input"]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(r["tol"].as_f64(), Some(1e-9));
    assert_rederivable(&r["certificate"]["checks"]);
    assert!(r["certificate"]["checks"][0]["wall_time_s"].is_number());
}

#[test]
fn analyze_identity_fails_regularity_but_records_pentagon() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "identity", "--dim", "2", "-o", "id.json"]);
    let o = run(dir.path(), &["analyze", "id.json", "--object", "F", "--report", "r.json"]);
    assert_eq!(code(&o), 1);
    let r = json(dir.path().join("r.json"));
    let checks = &r["certificate"]["checks"];
    assert_rederivable(checks);
    let find = |name: &str| checks.as_array().unwrap().iter().find(|c| c["name"] == name).unwrap().clone();
    assert_eq!(find("pentagon")["pass"], true);
    assert_eq!(find("rank_c")["pass"], false);
    assert_eq!(r["certificate"]["regularity"]["regular"], false);
}

#[test]
fn analyze_corrupted_matrix_reports_unitarity_failure() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "kac-takesaki", "--n", "2", "-o", "w.json"]);
    let mut v = json(dir.path().join("w.json"));
    v["operators"]["W"]["matrix"][0][0] = serde_json::json!([0.5, 0.0]);
    std::fs::write(dir.path().join("bad.json"), v.to_string()).unwrap();
    let o = run(dir.path(), &["analyze", "bad.json", "--object", "W", "--report", "r.json"]);
    assert_eq!(code(&o), 1);
    let r = json(dir.path().join("r.json"));
    assert_eq!(r["checks"][0]["name"], "unitarity");
    assert_eq!(r["checks"][0]["pass"], false);
    assert_rederivable(&r["checks"]);
}

#[test]
fn analyze_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "kac-takesaki", "--n", "2", "-o", "w.json"]);
    assert_eq!(code(&run(dir.path(), &["analyze", "w.json", "--object", "Nope"])), 2);
    assert_eq!(code(&run(dir.path(), &["analyze", "missing.json", "--object", "W"])), 2);
    std::fs::write(dir.path().join("v2.json"), r#"{"version": 2}"#).unwrap();
    let o = run(dir.path(), &["analyze", "v2.json", "--object", "W"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("version"));
}

#[test]
fn seeded_search_is_byte_identical_and_certified() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["search", "--category", "super", "--dim", "2", "--seed", "11", "--restarts", "8", "-o", out];
    assert_eq!(code(&run(dir.path(), &args("a.json"))), 0);
    assert_eq!(code(&run(dir.path(), &args("b.json"))), 0);
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed"], 11);
    assert!(v["count"].as_u64().unwrap() >= 1);
    for r in v["results"].as_array().unwrap() {
        assert_eq!(r["certificate"]["pass"], true);
        assert_rederivable(&r["certificate"]["checks"]);
        assert!(r["certificate"]["checks"][0].get("wall_time_s").is_none());
    }
}

#[test]
fn search_bundle_recertifies_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["search", "--category", "flip", "--dim", "2", "--seed", "4", "--restarts", "8", "-o", "s.json", "--bundle", "found.json"]);
    assert_eq!(code(&o), 0);
    let v = json(dir.path().join("s.json"));
    let count = v["count"].as_u64().unwrap();
    assert!(count >= 1);
    for i in 1..=count {
        let o = run(dir.path(), &["analyze", "found.json", "--object", &format!("F{i}")]);
        assert_eq!(code(&o), 0, "F{i}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn zero_target_residual_returns_nothing_or_exact_hits() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["search", "--category", "flip", "--dim", "2", "--restarts", "4", "--target-residual", "0", "-o", "z.json"]);
    assert_eq!(code(&o), 0);
    let v = json(dir.path().join("z.json"));
    for r in v["results"].as_array().unwrap() {
        assert_eq!(r["residual"].as_f64(), Some(0.0));
    }
    assert_eq!(v["count"].as_u64().unwrap() as usize, v["results"].as_array().unwrap().len());
}

#[test]
fn eval_pentagon_corpus_on_z2() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "kac-takesaki", "--n", "2", "-o", "w.json"]);
    let o = run(dir.path(), &["eval", &corpus("pentagon.stmt"), "w.json", "--report", "e.json"]);
    assert_eq!(code(&o), 0);
    let v = json(dir.path().join("e.json"));
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
    assert_eq!(v["data"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn eval_wrong_statement_exits_1_with_residual() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "kac-takesaki", "--n", "3", "-o", "w.json"]);
    std::fs::write(dir.path().join("bad.stmt"), "@context L L L\n@bind F = W\nF[1,2].F[2,3] == F[2,3].F[1,2]\n").unwrap();
    let o = run(dir.path(), &["eval", "bad.stmt", "w.json", "--report", "e.json"]);
    assert_eq!(code(&o), 1);
    let v = json(dir.path().join("e.json"));
    let r = &v["results"][0];
    assert_eq!(r["line"], 3);
    assert!(r["residual"].as_f64().unwrap() > 1.0);
    assert_eq!(r["pass"], false);
}

#[test]
fn eval_malformed_file_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["generate", "kac-takesaki", "--n", "2", "-o", "w.json"]);
    std::fs::write(dir.path().join("bad.stmt"), "@context L L L\nF[1,2 == F[1,2]\n").unwrap();
    let o = run(dir.path(), &["eval", "bad.stmt", "w.json"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2, column"), "{err}");
}
