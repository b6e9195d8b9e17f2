use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schroeder"))
        .args(args)
        .env_remove("SCHROEDER_ORDER")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn coefficients(v: &Value) -> Vec<String> {
    v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn solve_prints_exact_psi() {
    let v = json(&["solve", "--map", "ricker", "--order", "4"]);
    assert_eq!(v["domain"], "rational");
    assert_eq!(v["s"], "2/1");
    assert_eq!(coefficients(&v), ["0/1", "1/1", "-1/1", "7/6", "-61/42"]);
}

#[test]
fn solve_inverse_of_schroder_example() {
    // Φ(y) = (e^{2y} - 1)/2
    let v = json(&["solve", "--map", "schroder-example", "--order", "4", "--inverse"]);
    assert_eq!(coefficients(&v), ["0/1", "1/1", "1/1", "2/3", "1/3"]);
}

#[test]
fn order_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_schroeder"))
        .args(["solve", "--map", "ricker"])
        .env("SCHROEDER_ORDER", "3")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], 3);
}

#[test]
fn output_is_deterministic() {
    let args = ["iterate", "--map", "ricker", "--float", "--order", "8", "--t", "0.3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    let out = run(&[
        "solve",
        "--map",
        "schroder-example",
        "--order",
        "2",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        "power,coefficient\n0,0/1\n1,1/1\n2,-1/1\n"
    );
}

#[test]
fn jet_flow_limit() {
    let v = json(&["iterate", "--map", "ricker", "--eps-jet", "2", "--order", "3", "--t", "1"]);
    // x e^x
    assert_eq!(coefficients(&v), ["0/1", "1/1", "1/1", "1/2"]);
    let raw = json(&[
        "iterate", "--map", "ricker", "--eps-jet", "2", "--order", "3", "--t", "1", "--jets",
    ]);
    assert_eq!(raw["domain"], "epsjet");
    assert!(raw["eps_upper"].is_array());
}

#[test]
fn physical_velocity_profiles() {
    let v = json(&["velocity", "--map", "sextic", "--order", "5", "--physical"]);
    let c: Vec<f64> = coefficients(&v).iter().map(|c| c.parse().unwrap()).collect();
    let expected = [0.0, 1.0, 0.0, -1.0, 0.0, 0.0];
    for (a, b) in c.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{c:?}");
    }
}

#[test]
fn potential_with_mass() {
    let v = json(&[
        "potential", "--map", "schroder-example", "--order", "4", "--reduced", "--mass", "2",
    ]);
    // v/ln2 = (1+2x) ln(1+2x)/2 → -(v/ln2)²
    assert_eq!(coefficients(&v), ["0/1", "0/1", "-1/1", "-2/1", "1/3"]);
}

#[test]
fn irrational_time_is_reported() {
    let out = run(&["iterate", "--map", "quadratic", "--t", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not representable"));
}

#[test]
fn resonance_and_bad_input_exit_one() {
    for args in [
        vec!["solve", "--map", "ricker", "--s", "1"],
        vec!["solve", "--map", "ricker", "--s", "-1"],
        vec!["solve", "--map", "nope"],
        vec!["solve", "--map", "quadratic", "--s", "3"],
        vec!["solve", "--map", "poly:0,1"],
        vec!["solve", "--frobnicate"],
        vec!["iterate", "--map", "poly:2,1", "--eps-jet", "2", "--t", "1"],
    ] {
        assert_eq!(run(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn exact_check_passes() {
    let v = json(&["check", "--map", "ricker", "--order", "6"]);
    assert_eq!(v["all_exact_zero"], true);
    let v = json(&["check", "--map", "poly:3,1,-2", "--order", "6"]);
    assert_eq!(v["all_exact_zero"], true);
    let v = json(&["check", "--map", "ricker", "--order", "6", "--eps-jet", "2"]);
    assert_eq!(v["all_exact_zero"], true);
}

#[test]
fn float_check_is_small() {
    let v = json(&["check", "--map", "ricker", "--float", "--order", "10"]);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["relative"].as_f64().unwrap() < 1e-12, "{c}");
    }
}

#[test]
fn jet_window_bounds() {
    let out = run(&["iterate", "--map", "ricker", "--eps-jet=-1", "--order", "6", "--t", "1/3"]);
    assert_eq!(out.status.code(), Some(1));
    let lo = json(&["iterate", "--map", "ricker", "--eps-jet", "0", "--order", "6", "--t", "1/3"]);
    let hi = json(&["iterate", "--map", "ricker", "--eps-jet", "4", "--order", "6", "--t", "1/3"]);
    assert_eq!(lo["coefficients"], hi["coefficients"]);
}

#[test]
fn surface_grid() {
    let out = run(&[
        "surface", "--map", "quadratic", "--nx", "3", "--nt", "2", "--format", "csv",
    ]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "x,t,value\n-1,0,-1\n0,0,0\n1,0,1\n-1,1,-2\n0,1,0\n1,1,2\n"
    );
    let v = json(&["surface", "--map", "ricker", "--order", "8", "--nx", "5", "--nt", "3"]);
    assert_eq!(v["provenance"]["domain"], "float");
    assert_eq!(v["values"].as_array().unwrap().len(), 3);
    let v = json(&[
        "surface", "--map", "ricker", "--eps-jet", "2", "--order", "6", "--nx", "3", "--nt", "2",
    ]);
    assert_eq!(v["provenance"]["domain"], "epsjet");
    // t = 1 row is x e^x
    let row = v["values"][1].as_array().unwrap();
    assert!((row[2].as_f64().unwrap() - 1.0f64.exp()).abs() < 1e-2);
}

#[test]
fn koenigs_converges() {
    let v = json(&["koenigs", "--map", "quartic", "--x", "0.5", "--iterations", "25"]);
    let err = v["rows"][0]["error"].as_f64().unwrap();
    assert!(err < 1e-10, "{v}");
    let out = run(&[
        "koenigs", "--map", "schroder-example", "--x", "0.3", "--iterations", "5", "--trace",
        "--format", "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn pn_table() {
    let v = json(&["pn", "--n", "4", "--s", "2"]);
    assert_eq!(v["polynomial"], "16s^3 + 8s^2 + 11s + 1");
    assert_eq!(v["psi_coefficient"], "-61/42");
    assert!(v["structural_terms"]
        .as_array()
        .unwrap()
        .iter()
        .all(|t| t["matches"] == true));
}

#[test]
fn catalog_lists_all_maps() {
    let v = json(&["catalog"]);
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["schroder-example", "ricker", "quadratic", "quartic", "sextic"]);
}
