use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const MIXED_SPECTRUM: &str = r#"{
    "timescale": {"type": "finite", "points": [0, 1, 2, 3, 4, 5]},
    "frozen_argument": 3,
    "potential": {"type": "table", "values": [-3, 10, -5, 1]},
    "boundary": {"separated": {"h": 0.5, "H": 1}}
}"#;

const TWO_INTERVAL: &str = r#"{
    "timescale": {"type": "two_interval", "alpha": 0, "delta1": 1, "delta2": 2, "beta": 3},
    "frozen_argument": 0.5,
    "potential": {"type": "const", "value": 1},
    "boundary": {"general": {"a": [0, 1, 0, 0], "b": [0, 0, 0, 1]}},
    "solver": {"n_max": 30}
}"#;

struct Config {
    _dir: tempfile::TempDir,
    path: PathBuf,
}

fn config(text: &str) -> Config {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("problem.json");
    std::fs::write(&path, text).unwrap();
    Config { _dir: dir, path }
}

fn frozen_sl(args: &[&str], cfg: &Config, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_frozen-sl"));
    cmd.args(args).arg("--config").arg(&cfg.path);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn eigs_reports_the_example_spectrum() {
    let cfg = config(MIXED_SPECTRUM);
    let out = frozen_sl(&["eigs"], &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 4);
    assert_eq!(v["degenerate"], false);
    let zero = v["eigenvalues"].as_array().unwrap().iter().find(|e| e["re"] == 0.0).unwrap();
    assert_eq!(zero["multiplicity"], 2);
    assert_eq!(zero["im"], 0.0);
}

#[test]
fn rational_flag_adds_the_exact_polynomial() {
    let cfg = config(MIXED_SPECTRUM);
    let v = json(&frozen_sl(&["eigs", "--rational"], &cfg, &[]));
    let coeffs: Vec<&str> = v["char_poly"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(coeffs, ["0", "0", "-1", "-1/2", "-1/2"]);
}

#[test]
fn csv_and_text_use_seventeen_significant_digits() {
    let cfg = config(MIXED_SPECTRUM);
    let out = frozen_sl(&["eigs", "--output", "csv"], &cfg, &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,multiplicity,residual"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "-5.0000000000000000e-1");
    assert_eq!(row[1], "-1.3228756555322954e0");

    let out = frozen_sl(&["count", "--output", "text"], &cfg, &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("exactly 4 eigenvalues"), "{text}");
}

#[test]
fn count_and_matrix_agree_with_the_polynomial_path() {
    let cfg = config(MIXED_SPECTRUM);
    let v = json(&frozen_sl(&["count"], &cfg, &[]));
    assert_eq!((v["predicted"].clone(), v["exact"].clone(), v["degree"].clone()), (4.into(), true.into(), 4.into()));
    assert_eq!(v["detA"], -0.5);
    let v = json(&frozen_sl(&["matrix", "--rational"], &cfg, &[]));
    assert_eq!(v["agrees_with_polynomial_path"], true);
    assert_eq!(v["Q_exact"][0], serde_json::json!(["0", "-1", "-3", "0"]));
    assert_eq!(v["trace"], -1.0);
}

#[test]
fn verify_passes_on_both_scale_kinds() {
    for text in [MIXED_SPECTRUM, TWO_INTERVAL] {
        let cfg = config(text);
        let out = frozen_sl(&["verify"], &cfg, &[]);
        let v = json(&out);
        assert_eq!(v["all_pass"], true, "{v}");
        assert_eq!(out.status.code(), Some(0));
        assert!(v["checks"].as_array().unwrap().len() >= 6);
    }
}

#[test]
fn asymptotics_shows_decay_of_order_one_over_n() {
    let cfg = config(TWO_INTERVAL);
    let v = json(&frozen_sl(&["asymptotics"], &cfg, &[]));
    assert!(v["banner"].is_null());
    assert!(v["decay_slope"].as_f64().unwrap() <= -0.8);
    assert!(v["max_spacing_deviation"].as_f64().unwrap() <= 0.02);
    assert_eq!(v["rows"].as_array().unwrap().last().unwrap()["n"], 30);
}

#[test]
fn count_in_a_box_matches_the_real_scan() {
    let cfg = config(TWO_INTERVAL);
    let boxed = json(&frozen_sl(&["count"], &cfg, &[]));
    let real = json(&frozen_sl(&["eigs"], &cfg, &[]));
    assert_eq!(boxed["count"], real["count"]);
}

#[test]
fn thread_cap_does_not_change_results() {
    let cfg = config(TWO_INTERVAL);
    let one = frozen_sl(&["eigs"], &cfg, &[("FROZEN_SL_THREADS", "1")]);
    let many = frozen_sl(&["eigs"], &cfg, &[("FROZEN_SL_THREADS", "4")]);
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn flags_override_the_config() {
    let cfg = config(TWO_INTERVAL);
    let v = json(&frozen_sl(&["eigs", "--lambda-max", "30"], &cfg, &[]));
    assert_eq!(v["scan"]["lambda_max"], 30.0);
    assert!(v["eigenvalues"].as_array().unwrap().iter().all(|e| e["re"].as_f64().unwrap() <= 30.0));
}

#[test]
fn charfn_samples_a_given_grid() {
    let text = MIXED_SPECTRUM.replace(
        "\"boundary\"",
        "\"solver\": {\"lambda_grid\": [0, 1, 2]},\n    \"boundary\"",
    );
    let cfg = config(&text);
    let out = frozen_sl(&["charfn", "--output", "csv"], &cfg, &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    // Δ(0) = 0 for the example (double root at the origin)
    assert!(lines[1].starts_with("0.0000000000000000e0,0.0000000000000000e0,"), "{text}");
}

#[test]
fn degenerate_boundary_rows_are_reported() {
    let text = MIXED_SPECTRUM.replace(
        "{\"separated\": {\"h\": 0.5, \"H\": 1}}",
        "{\"general\": {\"a\": [1, 2, 0, 0], \"b\": [2, 4, 0, 0]}}",
    );
    let v = json(&frozen_sl(&["eigs"], &config(&text), &[]));
    assert_eq!(v["degenerate"], true);
    assert!(v["count"].is_null());
}

#[test]
fn errors_are_structured_and_nonzero() {
    let bad = MIXED_SPECTRUM.replace("\"frozen_argument\": 3", "\"frozen_argument\": 7");
    let out = frozen_sl(&["eigs"], &config(&bad), &[]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "config");
    assert_eq!(v["error"]["path"], "frozen_argument");

    let h1 = MIXED_SPECTRUM.replace("\"h\": 0.5", "\"h\": 1");
    let v = json(&frozen_sl(&["matrix"], &config(&h1), &[]));
    assert_eq!(v["error"]["kind"], "matrix_form");
    assert!(v["error"]["message"].as_str().unwrap().contains("polynomial path"));

    let out = frozen_sl(&["asymptotics"], &config(MIXED_SPECTRUM), &[]);
    assert_eq!(out.status.code(), Some(2));
}
