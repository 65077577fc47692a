use std::process::{Command, Output};

use expanderlab::poly::Rat;
use expanderlab::RatPoly;
use expanderlab_cli::parse::parse_poly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn expanderlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expanderlab"))
        .args(args)
        .env_remove("EXPANDERLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn random_poly(rng: &mut ChaCha8Rng, arity: usize) -> RatPoly {
    let n = rng.gen_range(0..7);
    RatPoly::from_terms(
        arity,
        (0..n).map(|_| {
            let exps = (0..arity).map(|_| rng.gen_range(0..5)).collect();
            let num: i64 = rng.gen_range(-40..=40);
            let den: i64 = rng.gen_range(1..=9);
            (exps, Rat::new(num.into(), den.into()))
        }),
    )
}

#[test]
fn printer_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for i in 0..500 {
        let arity = 1 + i % 3;
        let p = random_poly(&mut rng, arity);
        let names = RatPoly::default_names(arity);
        let text = p.to_string_with(names);
        assert_eq!(parse_poly(&text, names).unwrap(), p, "{text}");
    }
}

#[test]
fn classify_reports_verdicts() {
    let v = json(&expanderlab(&["classify", "--poly", "x*y"]));
    assert_eq!(v["verdict"], "Multiplicative");
    assert_eq!(v["verified"], true);
    let v = json(&expanderlab(&["classify", "--poly", "(x*y+1)^2"]));
    assert_eq!(v["composite"]["inner"], "x*y + 1");
    assert_eq!(v["composite"]["outer"], "t^2");
    let v = json(&expanderlab(&["classify", "--poly", "x^2 + x*y"]));
    assert_eq!(v["verdict"], "NoStructure");
    let v = json(&expanderlab(&["classify", "--poly", "u^2*v", "--vars", "u,v"]));
    assert_eq!(v["input"], "u^2*v");
    assert_eq!(v["f"], "u^2");
    let v = json(&expanderlab(&["classify", "--poly", "x + 12*y", "--p", "13"]));
    assert_eq!(v["input"], "x - y");
    assert_eq!(v["lifted_from"], 13);
}

#[test]
fn expand_reports_image_and_flags() {
    let v = json(&expanderlab(&[
        "expand", "--poly", "x^2+x*y", "--p", "1009", "--setA", "random:957:3", "--setB", "random:957:3",
    ]));
    assert_eq!(v["image_size"], 1009);
    assert_eq!(v["moderate"]["holds"], true);
    let v = json(&expanderlab(&[
        "expand", "--poly", "x+y", "--p", "101", "--setA", "ap:0:1:10", "--setB", "ap:0:1:10", "--setC",
        "interval:0:101", "--quadruples",
    ]));
    assert_eq!(v["image_size"], 19);
    assert_eq!(v["incidence"]["count"], 100);
    assert_eq!(v["incidence"]["main_term"], "100");
    assert_eq!(v["quadruples"]["mode"], "sampled");
}

#[test]
fn regularity_certificate() {
    let v = json(&expanderlab(&["regularity", "--kind", "qr-difference", "--p", "13", "--codegrees"]));
    let sigma = v["pairs"][0]["sigma"].as_f64().unwrap();
    assert!((sigma - (1.0 + 13f64.sqrt()) / 2.0).abs() < 1e-6);
    assert_eq!(v["cells"], serde_json::json!([13]));
    assert_eq!(v["codegrees"]["min"], 2);
    let v = json(&expanderlab(&["regularity", "--kind", "qr-product", "--p", "13", "--partition", "qr"]));
    for pair in v["pairs"].as_array().unwrap() {
        let d = pair["d"].as_f64().unwrap();
        assert!(d == 0.0 || d == 1.0);
    }
    let v = json(&expanderlab(&[
        "regularity", "--kind", "poly-level-set", "--p", "11", "--poly", "v + w", "--level", "interval:0:1",
    ]));
    assert_eq!(v["kind"], "poly-level-set");
}

#[test]
fn charsum_csv_rows() {
    let out = expanderlab(&["charsum", "--kind", "gauss", "--primes", "3..20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,magnitude,bound,satisfied");
    assert_eq!(lines.len(), 1 + 7);
    assert!(lines[1].starts_with("3,1.73205080757,"));
    let out = expanderlab(&["charsum", "--kind", "mult", "--p", "13", "--factor", "t:1", "--factor", "t+1:1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1).unwrap().split(',').take(2).collect::<Vec<_>>(), ["13", "1"]);
    let out = expanderlab(&["charsum", "--kind", "mult", "--p", "13", "--factor", "t:2"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("13,12,,\n"));
    let v = json(&expanderlab(&[
        "--format", "json", "charsum", "--kind", "twisted", "--p", "13", "--set", "pullback:x^6:interval:0:2", "--f", "t",
        "--g", "t",
    ]));
    assert!((v[0]["magnitude"].as_f64().unwrap() - 1.302775637732).abs() < 1e-9);
}

#[test]
fn count_ladder() {
    let v = json(&expanderlab(&["count", "--kind", "definable", "--poly", "x - t^2", "--prime-ladder", "101,199"]));
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports[0]["n"], 51);
    assert_eq!(reports[1]["sigma_rational"], serde_json::json!([1, 2]));
    let out = expanderlab(&["--format", "csv", "count", "--kind", "curve", "--poly", "y^2 - x^3 - x", "--p", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("5,3,"));
    let v = json(&expanderlab(&["count", "--kind", "fibre", "--poly", "x*y", "--p", "11"]));
    assert_eq!(v["counts"][0], 21);
}

#[test]
fn exit_codes() {
    let out = expanderlab(&["classify", "--poly", "x^-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("negative exponent at 2..4"), "{}", stderr(&out));
    let out = expanderlab(&["classify", "--poly", "x + z"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown variable `z` at 4..5"));
    let out = expanderlab(&["classify", "--poly", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let out = expanderlab(&["expand", "--poly", "x+y", "--p", "100", "--setA", "ap:0:1:3", "--setB", "ap:0:1:3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = expanderlab(&["expand", "--poly", "x+y", "--p", "101", "--setA", "cube:1", "--setB", "ap:0:1:3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = expanderlab(&["regularity", "--kind", "qr-difference", "--p", "4099"]);
    assert_eq!(out.status.code(), Some(3));
    let out = expanderlab(&["expand", "--poly", "x+y", "--p", "101", "--quadruples", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("quadruple budget 100 below p^2 = 10201"));
    let out = expanderlab(&["--threads", "0", "classify", "--poly", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = expanderlab(&["--format", "csv", "classify", "--poly", "x*y"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_settings_do_not_change_reports() {
    let args = ["expand", "--poly", "x^2+x*y", "--p", "101", "--setA", "random:50:1", "--setB", "random:50:2"];
    let base = expanderlab(&args).stdout;
    let seq = expanderlab(&[&["--sequential"][..], &args].concat()).stdout;
    let env = Command::new(env!("CARGO_BIN_EXE_expanderlab"))
        .args(args)
        .env("EXPANDERLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(base, seq);
    assert_eq!(base, env.stdout);
}
