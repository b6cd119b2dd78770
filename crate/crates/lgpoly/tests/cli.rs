use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lgpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgpoly")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = lgpoly(args);
    assert!(out.status.success(), "{args:?} failed: {}", stderr(&out));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn assert_schema(name: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name} output violates its schema: {errors:?}");
}

/// Data lines of a CSV output: everything after the config comment.
fn csv_body(text: &str) -> Vec<String> {
    text.lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn laplace_all_methods_agree() {
    let doc = json_ok(&[
        "laplace",
        "--n",
        "2",
        "--N",
        "2",
        "--gamma",
        "1",
        "--u",
        "1",
        "--methods",
        "all",
        "--format",
        "json",
    ]);
    assert_schema("laplace", &doc);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
    assert_eq!(doc["pairs"].as_array().unwrap().len(), 6);
    assert_eq!(doc["all_agree"], Value::Bool(true));
}

#[test]
fn laplace_single_method_is_one_row() {
    let out = lgpoly(&["laplace", "--n", "1", "--N", "1", "--methods", "nystrom"]);
    assert!(out.status.success());
    let body = csv_body(&stdout(&out));
    assert_eq!(body[0], "u,method,value,error_estimate,imag_residual,max_abs_deviation,max_rel_deviation");
    assert_eq!(body.len(), 2);
    assert!(body[1].contains(",nystrom,"));
}

#[test]
fn laplace_rejects_wide_delta1() {
    let out = lgpoly(&["laplace", "--delta1", "0.6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("delta1 must be < min(delta2, 1−delta2)"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(lgpoly(&["laplace", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(lgpoly(&["laplace", "--methods", "quadrature"]).status.code(), Some(1));
    assert!(lgpoly(&["--help"]).status.success());
}

#[test]
fn short_contour_is_a_numerical_failure() {
    let out = lgpoly(&["laplace", "--methods", "nfold", "--nfold-truncation", "0.5"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert_eq!(lgpoly(&["twdist", "--truncation", "0.3"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 1, "N": 1, "u": [0.5, 2.0], "methods": ["nystrom"], "seed": 9, "format": "json"}"#)
        .unwrap();
    let doc = json_ok(&["laplace", "--config", cfg.to_str().unwrap(), "--u", "1"]);
    assert_schema("laplace", &doc);
    let c = &doc["config"];
    assert_eq!(c["n"], 1);
    assert_eq!(c["seed"], 9);
    assert_eq!(c["u"], serde_json::json!([1.0]));
    assert_eq!(c["delta2"], 0.5);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);

    std::fs::write(&cfg, r#"{"gama": 1}"#).unwrap();
    let out = lgpoly(&["laplace", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown config key \"gama\""));
}

#[test]
fn fluct_is_deterministic_and_writes_samples() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let args = [
            "fluct",
            "--gamma",
            "0.5",
            "--n",
            "8,16,32",
            "--samples",
            "400",
            "--seed",
            "7",
            "--tw-order",
            "8",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ];
        let o = lgpoly(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read_to_string(out).unwrap()
    };
    let first = run("a.csv", "1");
    let second = run("b.csv", "1");
    assert_eq!(first, second);
    let body = csv_body(&first);
    assert_eq!(body[0], "n,samples,ks,mean,std_dev");
    assert_eq!(body.len(), 4);
    let samples = std::fs::read_to_string(dir.path().join("a.samples-n16.csv")).unwrap();
    assert_eq!(csv_body(&samples).len(), 401);
    assert_eq!(samples, std::fs::read_to_string(dir.path().join("b.samples-n16.csv")).unwrap());
    // Worker count changes only the echoed config line.
    assert_eq!(csv_body(&run("c.csv", "2")), body);
}

#[test]
fn fluct_json_matches_schema() {
    let doc = json_ok(&["fluct", "--n", "8", "--samples", "200", "--tw-order", "8", "--format", "json"]);
    assert_schema("fluct", &doc);
    assert!(f(&doc["rows"][0]["ks"]) < 0.2);
}

#[test]
fn fluct_rejects_zero_samples() {
    assert_eq!(lgpoly(&["fluct", "--samples", "0"]).status.code(), Some(1));
}

#[test]
fn twdist_column_is_a_cdf() {
    let out = lgpoly(&["twdist", "--r-min", "-5", "--r-max", "3", "--r-step", "0.5"]);
    assert!(out.status.success());
    let body = csv_body(&stdout(&out));
    assert_eq!(body[0], "r,cdf");
    let cdf: Vec<f64> = body[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(cdf.len(), 17);
    assert!(cdf.iter().all(|&x| x > 0.0 && x < 1.0));
    assert!(cdf.windows(2).all(|p| p[1] >= p[0]));
}

#[test]
fn twdist_crosscheck_against_airy() {
    let doc = json_ok(&["twdist", "--crosscheck", "--format", "json"]);
    assert_schema("twdist", &doc);
    assert!(f(&doc["max_abs_deviation"]) <= 1e-6);
    assert_eq!(doc["monotone"], Value::Bool(true));
}

#[test]
fn twdist_empty_grid() {
    assert_eq!(lgpoly(&["twdist", "--r-min", "1", "--r-max", "0"]).status.code(), Some(1));
    assert_eq!(lgpoly(&["twdist", "--r-step", "0"]).status.code(), Some(1));
}

#[test]
fn descent_constants_positive_and_stable() {
    let constants = |m: &str| {
        let doc = json_ok(&["descent", "--gamma", "0.2", "--samples-per-segment", m]);
        assert_schema("descent", &doc);
        let r = &doc["report"];
        [f(&r["c1"]), f(&r["c2"]), f(&r["c_arc"]), f(&r["c_line"])]
    };
    let coarse = constants("10");
    let fine = constants("1000");
    for (c, d) in coarse.iter().zip(&fine) {
        assert!(*c > 0.0 && *d > 0.0);
        assert!((c - d).abs() <= 0.2 * d, "{coarse:?} vs {fine:?}");
    }
}

#[test]
fn descent_rejects_negative_gamma() {
    assert_eq!(lgpoly(&["descent", "--gamma", "-1"]).status.code(), Some(1));
}

#[test]
fn semidiscrete_matches_oracle() {
    let doc = json_ok(&["semidiscrete", "--format", "json"]);
    assert_schema("semidiscrete", &doc);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 8);
    assert!(f(&doc["max_abs_deviation"]) <= 1e-5);
    let out = lgpoly(&["semidiscrete", "--delta1", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_floats_round_trip() {
    let out = lgpoly(&["semidiscrete", "--t", "1", "--u", "1", "--a", "0"]);
    let body = csv_body(&stdout(&out));
    let value = body[1].split(',').nth(3).unwrap();
    let mantissa = value.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    let parsed: f64 = value.parse().unwrap();
    assert_eq!(format_17(parsed), value);
}

fn format_17(x: f64) -> String {
    format!("{x:.16e}")
}
