use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn efl(args: &[&str]) -> Output {
    efl_with_env(args, None)
}

fn efl_with_env(args: &[&str], data_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_efl"));
    cmd.args(args).current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."));
    match data_dir {
        Some(d) => cmd.env("EFL_DATA_DIR", d),
        None => cmd.env_remove("EFL_DATA_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn number(v: &Value, key: &str) -> f64 {
    v.pointer(key).and_then(Value::as_f64).unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn conductor_of_quadratic_character_mod_5() {
    let out = efl(&["conductor", "--p", "5", "--char-modulus", "5", "--char-gen", "2", "--char-exp", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((number(&v, "/value") - 5f64.ln()).abs() < 1e-11);
    assert_eq!(v["expected"], "f*log q");
    assert_eq!(v["f"], 1);
    assert_eq!(v["config"]["command"]["conductor"]["p"], 5);
}

#[test]
fn multi_generator_character_mod_8() {
    let out = efl(&[
        "conductor", "--p", "2", "--char-modulus", "8", "--char-gen", "7", "--char-exp", "0/1", "--char-gen", "5",
        "--char-exp", "1/2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["f"], 3);
}

#[test]
fn zabrodin_unit_ball() {
    let v = json(&efl(&["zabrodin", "--p", "2", "--phi", "builtin:unitball"]));
    let expected = 1.0 / (6.0 * 2f64.ln());
    assert!((number(&v, "/momentumForm") - expected).abs() < 1e-11);
    assert!((number(&v, "/positionForm") - expected).abs() < 1e-11);
    assert_eq!(v["equal"], true);
}

#[test]
fn zabrodin_random_batch() {
    let out = efl(&["zabrodin", "--p", "3", "--phi", "random", "--seed", "7", "--count", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["values"].as_array().unwrap().len(), 10);
    assert_eq!(v["config"]["command"]["zabrodin"]["seed"], 7);
}

#[test]
fn explicit_formula_exit_codes() {
    let poles_only = efl(&["ef", "verify", "--character", "trivial", "--zeros", "data/zeta_zeros.txt", "--max-zeros", "0"]);
    assert_eq!(poles_only.status.code(), Some(2));
    assert_eq!(json(&poles_only)["passed"], false);
    let full = efl(&["ef", "verify", "--character", "trivial", "--test-fn", "bump:0.5:2", "--max-zeros", "100"]);
    assert_eq!(full.status.code(), Some(0));
    let v = json(&full);
    assert_eq!(v["passed"], true);
    assert!(number(&v, "/residual") <= number(&v, "/tailBound"));
}

#[test]
fn data_dir_override_supplies_the_default_table() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("zeta_zeros.txt"), "# first three\n14.134725142\n21.022039639\n25.010857580\n").unwrap();
    let out = efl_with_env(&["ef", "verify", "--max-zeros", "100"], Some(dir.path()));
    let v = json(&out);
    assert_eq!(v["zerosUsed"], 3);
    assert!(v["config"]["zerosPath"].as_str().unwrap().starts_with(dir.path().to_str().unwrap()));
}

#[test]
fn logft_on_a_bruhat_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.json");
    let file = r#"{"p": 3, "delta": 0, "terms": [{"re": 1.0, "im": 0.0, "center_valuation": 0, "center_digits": [], "radius_exp": 0}]}"#;
    std::fs::write(&path, file).unwrap();
    let v = json(&efl(&["logft", "--place", "p:3", "--phi", path.to_str().unwrap()]));
    // G(1_{Z_3}) = log 3 / (3 - 1)
    assert!((number(&v, "/value/re") - 3f64.ln() / 2.0).abs() < 1e-11);
    assert!(v["constants"].is_object());
}

#[test]
fn logft_real_gaussian_agrees_across_tags() {
    let a = json(&efl(&["logft", "--place", "real", "--phi", "builtin:gaussian", "--regularization", "realIndicator"]));
    let b = json(&efl(&["logft", "--place", "real", "--phi", "builtin:gaussian", "--regularization", "realSinc"]));
    assert!((number(&a, "/value/re") - number(&b, "/value/re")).abs() < 1e-9);
}

#[test]
fn gamma_has_modulus_one_on_the_critical_line() {
    for place in ["p:5", "real", "complex"] {
        let v = json(&efl(&["gamma", "--place", place, "--s", "0.5+14.13i"]));
        assert!((number(&v, "/abs") - 1.0).abs() < 1e-10, "{place}: {v}");
    }
}

#[test]
fn hop_eigenvalue_for_a_ramified_character() {
    let v = json(&efl(&["hop", "--p", "5", "--char", "mod:5:gen:2:exp:1/4"]));
    assert!((number(&v, "/rayleighQuotient/re") - 5f64.ln()).abs() < 1e-11);
}

#[test]
fn mellin_at_one_is_the_integral_against_dt_over_t() {
    let v = json(&efl(&["mellin", "--test-fn", "indicator:1:2", "--s", "1"]));
    assert!((number(&v, "/re") - 1.0).abs() < 1e-9);
}

#[test]
fn weil_finite_paths_agree() {
    let v = json(&efl(&["weil", "--place", "p:2", "--test-fn", "bump:0.5:2"]));
    assert!((number(&v, "/convolutionPath/re") - number(&v, "/annulusPath/re")).abs() < 1e-12);
}

#[test]
fn output_is_deterministic_and_formats_agree() {
    let args = ["gamma", "--place", "real", "--s", "0.3+2i"];
    let first = efl(&args);
    let second = efl(&args);
    assert_eq!(first.stdout, second.stdout);
    let v = json(&first);
    let table = String::from_utf8(efl(&[&args[..], &["--format", "table"]].concat()).stdout).unwrap();
    let row = |k: &str| {
        table
            .lines()
            .find_map(|l| l.strip_prefix(k).filter(|r| r.starts_with(' ')).map(|r| r.trim().parse::<f64>().unwrap()))
            .unwrap()
    };
    assert_eq!(row("re"), number(&v, "/re"));
    assert_eq!(row("im"), number(&v, "/im"));
    let csv = String::from_utf8(efl(&[&args[..], &["--format", "csv"]].concat()).stdout).unwrap();
    assert!(csv.lines().any(|l| l == format!("re,{}", v["re"])));
}

#[test]
fn usage_and_data_errors_exit_with_one() {
    assert_eq!(efl(&["gamma", "--bogus"]).status.code(), Some(1));
    assert_eq!(efl(&["frobnicate"]).status.code(), Some(1));
    let out = efl(&["gamma", "--place", "p:4", "--s", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = efl(&["ef", "verify", "--zeros", "no/such/table.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let out = efl(&["logft", "--place", "real", "--phi", "builtin:gaussian", "--regularization", "finiteUnitBall"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not defined at place"));
}
