use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn scene(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenes")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["lamina"];
    argv.extend_from_slice(args);
    let code = lamina_cli::run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn tmp(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn binary_reports_markov_family() {
    let out = Command::new(env!("CARGO_BIN_EXE_lamina"))
        .args(["markov", "verify", &scene("golden.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "Markov family: OK\n");
}

#[test]
fn premarkov_family_is_rejected() {
    let (code, out, _) = run(&["markov", "verify", &scene("premarkov.json")]);
    assert_eq!(code, 1);
    assert!(
        out.contains("image of R1 meets R1 in 2 components"),
        "{out}"
    );
    let (code, _, err) = run(&["markov", "entropy", &scene("premarkov.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("not a Markov family"), "{err}");
}

#[test]
fn golden_entropy_and_words() {
    let dir = tempfile::tempdir().unwrap();
    let json = tmp(&dir, "entropy.json");
    let (code, out, _) = run(&[
        "markov",
        "entropy",
        &scene("golden.json"),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("kappa = 1.618033988750"), "{out}");
    let v = read_json(&json);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((v["kappa"].as_f64().unwrap() - phi).abs() < 1e-9);
    assert!((v["entropy"].as_f64().unwrap() - phi.ln()).abs() < 1e-9);
    assert_eq!(v["matrix"], serde_json::json!([[1, 1], [1, 0]]));

    let (code, out, _) = run(&["markov", "words", &scene("golden.json"), "--length", "5"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("13 admissible word(s) of length 5"));
    assert_eq!(out.lines().count(), 14);
    let (_, out, _) = run(&[
        "markov",
        "words",
        &scene("golden.json"),
        "--length",
        "20",
        "--list",
        "10",
    ]);
    assert_eq!(out.trim(), "17711 admissible word(s) of length 20");
}

#[test]
fn premarkov_measures_share_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let json = tmp(&dir, "measure.json");
    let (code, _, _) = run(&[
        "markov",
        "measure",
        &scene("premarkov.json"),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v = read_json(&json);
    // B = [[2, 1], [1, 0]] has Perron root 1 + sqrt 2.
    let kappa = 1.0 + 2f64.sqrt();
    assert!((v["kappa"].as_f64().unwrap() - kappa).abs() < 1e-9);
    assert!(v["kappa_gap"].as_f64().unwrap() < 1e-9);
    let y: Vec<f64> = v["plus"]["y"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((y[0] / y[1] - (1.0 + 2f64.sqrt())).abs() < 1e-9);
}

#[test]
fn escape_reports_per_juncture() {
    let dir = tempfile::tempdir().unwrap();
    let json = tmp(&dir, "escape.json");
    let (code, out, _) = run(&[
        "escape",
        &scene("schottky_ab.json"),
        "--horizon",
        "6",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("non-escaping").count(), 2, "{out}");
    let v = read_json(&json);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["verdict"], "non-escaping");
    assert_eq!(v[0]["iterates"].as_array().unwrap().len(), 7);

    let (code, out, _) = run(&["escape", &scene("schottky_inner.json")]);
    assert_eq!(code, 0);
    assert_eq!(out.matches(": escaping").count(), 2, "{out}");
    let (code, _, err) = run(&["escape", &scene("schottky_ab.json"), "--horizon", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("horizon of at least 3"));
}

#[test]
fn axioms_report_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = tmp(&dir, "axioms.json");
    let (code, out, _) = run(&[
        "axioms",
        &scene("schottky_ab.json"),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("finite-approximation evidence only"));
    let v = read_json(&json);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    assert_eq!(checks[0]["axiom"], "I");
    assert_eq!(checks[0]["status"], "pass");
    assert_eq!(v["endperiodic_like"], true);
    assert_eq!(v["escapes"].as_array().unwrap().len(), 2);
}

#[test]
fn laminate_json_lists_leaves() {
    let dir = tempfile::tempdir().unwrap();
    let json = tmp(&dir, "lam.json");
    let (code, out, _) = run(&[
        "laminate",
        &scene("schottky_ab.json"),
        "--horizon",
        "8",
        "--ball",
        "1",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("crossing pairs within a lamination: 0"));
    let v = read_json(&json);
    let plus = v["plus"]["leaves"].as_array().unwrap();
    assert!(!plus.is_empty());
    assert_eq!(
        plus.len(),
        v["plus"]["certificates"].as_array().unwrap().len()
    );
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (tmp(&dir, "a.svg"), tmp(&dir, "b.svg"));
    for p in [&a, &b] {
        let (code, _, _) = run(&[
            "render",
            &scene("schottky_ab.json"),
            "--horizon",
            "6",
            "--ball",
            "2",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.matches("<g ").count(), 4);
    assert!(!text.contains("-0.000000000"));
}

#[test]
fn input_errors_exit_one() {
    let (code, _, err) = run(&["laminate", "definitely-missing.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("file not found: definitely-missing.json"));

    let dir = tempfile::tempdir().unwrap();
    let bad = tmp(&dir, "bad.json");
    let text = std::fs::read_to_string(scene("schottky_ab.json"))
        .unwrap()
        .replace("[[2.125, -1.875], [-1.875, 2.125]]", "[[1, 1], [0, 1]]");
    std::fs::write(&bad, text).unwrap();
    let (code, _, err) = run(&["laminate", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("generator b is not hyperbolic"), "{err}");

    let (code, _, err) = run(&["markov", "verify", &scene("schottky_ab.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("markov"), "{err}");
    let (code, _, err) = run(&["laminate", &scene("golden.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("group"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&[]).0, 1);
    assert_eq!(run(&["limit-set", &scene("schottky_ab.json")]).0, 1);
    assert_eq!(
        run(&["laminate", &scene("schottky_ab.json"), "--horizon", "x"]).0,
        1
    );
}

#[test]
fn budget_exhaustion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = tmp(&dir, "big.svg");
    let (code, _, err) = run(&[
        "limit-set",
        &scene("schottky_ab.json"),
        "--depth",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("budget exceeded"));
    assert!(!out.exists());
}

#[test]
fn unwritable_output_is_internal() {
    let (code, _, err) = run(&[
        "limit-set",
        &scene("schottky_ab.json"),
        "--depth",
        "1",
        "--out",
        "/nonexistent-dir/x.svg",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("cannot write"));
}
