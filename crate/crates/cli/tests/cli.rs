use std::process::{Command, Output};

use serde_json::Value;

use rdsym_core::model::Interval;
use rdsym_core::solutions::catalog;
use rdsym_core::symmetry::preimaged_cubic_case;

fn rdsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .args(args)
        .env_remove("RDSYM_SEED")
        .output()
        .expect("rdsym runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&o.stdout)
        )
    })
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn classify_exponential_imaged_row() {
    let o = rdsym(&[
        "classify", "--class", "imaged", "--H", "exp(x)", "--F", "-0.25", "--m", "3", "--domain",
        "x:0.5..3",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["case"], "T1/2");
    assert!((v["q"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn classify_initial_row() {
    let o = rdsym(&[
        "classify", "--class", "initial", "--f", "1", "--g", "1", "--h", "exp(x)", "--m", "3",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["case"], "T3/1.1");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&rdsym(&["classify", "--bogus"])), 64);
    assert_eq!(code(&rdsym(&["frobnicate"])), 64);
    assert_eq!(
        code(&rdsym(&[
            "classify", "--class", "imaged", "--H", "1", "--m", "3", "--domain", "0..1"
        ])),
        64
    );
}

#[test]
fn validation_errors_exit_2() {
    let o = rdsym(&[
        "map", "--to", "imaged", "--f", "x-1", "--h", "1", "--m", "3",
    ]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    assert_eq!(
        code(&rdsym(&[
            "classify", "--class", "imaged", "--H", "exp(", "--m", "3"
        ])),
        2
    );
}

#[test]
fn map_cosh_preimage_to_cubic_heat() {
    let o = rdsym(&[
        "map",
        "--to",
        "imaged",
        "--f",
        "cosh(x)^2",
        "--h",
        "cosh(x)^4",
        "--m",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["F"], "-1");
    assert_eq!(v["H"], "1");
    assert!(v["transformation"].is_object());
}

#[test]
fn map_to_double_imaged() {
    let o = rdsym(&["map", "--to", "double", "--F", "0", "--H", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["G"], "0");
    assert_eq!(v["H"], "1");
}

#[test]
fn map_additional_transformation() {
    let o = rdsym(&[
        "map",
        "--additional",
        "imaged-2-2",
        "--F",
        "-0.25",
        "--H",
        "-exp(x)",
        "--m",
        "3",
        "--param",
        "q=1",
        "--param",
        "delta=-1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["target_case"], "T1/2");
    assert!(v["deviation"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn verify_lie_operator_and_its_perturbation() {
    let base = [
        "verify", "--what", "lie", "--class", "imaged", "--F", "0", "--H", "-1", "--m", "3",
        "--tau", "2*t", "--xi", "x",
    ];
    let ok = rdsym(&[&base[..], &["--eta", "-u"]].concat());
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["pass"], true);
    let bad = rdsym(&[&base[..], &["--eta", "-u+0.01"]].concat());
    assert_eq!(code(&bad), 1);
    let v = json(&bad);
    assert_eq!(v["pass"], false);
    assert!(v["worst_point"].is_object());
}

#[test]
fn verify_reduction_operator_of_linear_zeta_row() {
    let case = preimaged_cubic_case(1, 1.0, 0.5, -1.0, 0.0, Interval::new(0.5, 2.0)).unwrap();
    for (_, q) in &case.operators {
        let (tau, xi, eta) = (q.tau.to_string(), q.xi.to_string(), q.eta.to_string());
        let o = rdsym(&[
            "verify",
            "--what",
            "nonclassical",
            "--class",
            "initial",
            "--f",
            "(x+0.5)^2",
            "--h",
            "-1*(x+0.5)^4",
            "--m",
            "3",
            "--tau",
            &tau,
            "--xi",
            &xi,
            "--eta",
            &eta,
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn verify_fisher_solution() {
    let o = rdsym(&[
        "verify",
        "--what",
        "solution",
        "--entry",
        "fisher/ablowitz-zeppetella",
    ]);
    assert_eq!(code(&o), 0);
    let o = rdsym(&[
        "verify",
        "--what",
        "solution",
        "--class",
        "imaged",
        "--F",
        "1",
        "--H",
        "-1",
        "--m",
        "2",
        "--solution",
        "(1/2 - 1/2*tanh(1/(2*sqrt(6))*(x - 5*t/sqrt(6))))^2",
        "--box",
        "x:-2..2",
    ]);
    assert_eq!(code(&o), 0);
    let o = rdsym(&[
        "verify",
        "--what",
        "solution",
        "--class",
        "imaged",
        "--F",
        "1",
        "--H",
        "-1",
        "--m",
        "2",
        "--solution",
        "(1/2 - 1/2*tanh(1/(2*sqrt(6))*(x - 5*t/sqrt(6))))",
        "--box",
        "x:-2..2",
    ]);
    assert_eq!(code(&o), 1);
    assert!(json(&o)["runs"][0]["report"]["worst"].is_array());
}

#[test]
fn verify_algebra_closure() {
    let o = rdsym(&[
        "verify", "--what", "algebra", "--op", "1;0;0", "--op", "0;1;0", "--op", "2*t;x;-u",
    ]);
    assert_eq!(code(&o), 0);
    let o = rdsym(&[
        "verify", "--what", "algebra", "--op", "0;1;0", "--op", "0;x^2;0",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn catalog_list_and_filters() {
    let all = json(&rdsym(&["catalog", "list"]));
    assert_eq!(all.as_array().unwrap().len(), catalog().len());
    let m3 = json(&rdsym(&["catalog", "list", "--filter", "m=3"]));
    let ids: Vec<&str> = m3
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"cubic0/sd") && ids.contains(&"cubic/ds-sinh"));
    assert!(ids.len() < catalog().len());
    assert!(m3
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["source"].is_string()));
}

#[test]
fn catalog_verify_all_has_no_failures() {
    let o = rdsym(&["catalog", "verify-all"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["failed"].as_array().unwrap().len(), 0);
    assert_eq!(v["total"].as_u64().unwrap() as usize, catalog().len());
}

#[test]
fn seed_is_reproducible() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_rdsym"))
            .args([
                "verify",
                "--what",
                "solution",
                "--entry",
                "kpp/eps-positive",
                "--bindings",
                "2",
            ])
            .env("RDSYM_SEED", seed)
            .output()
            .unwrap()
    };
    let (a, b, c) = (run("7"), run("7"), run("8"));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(code(&run("seven")), 64);
}
