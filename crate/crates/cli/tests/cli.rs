use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weightseq")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn status_of(report: &Value, property: &str) -> String {
    report["properties"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["property"] == property)
        .unwrap_or_else(|| panic!("no {property} in report"))["verdict"]["status"]
        .as_str()
        .unwrap()
        .to_string()
}

fn log_m(v: &Value) -> Vec<f64> {
    v["logM"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn analyze_gevrey_two_has_gamma1() {
    let r = json(&run(&["analyze", "gevrey:2"]));
    assert_eq!(status_of(&r, "gamma1"), "holds");
    assert_eq!(r["P"], 512);
}

#[test]
fn analyze_qgevrey_fails_mg_but_keeps_ratio_bound() {
    let r = json(&run(&["analyze", "qgevrey:2"]));
    assert_eq!(status_of(&r, "mg"), "fails");
    assert_eq!(status_of(&r, "quotient-ratio-bound"), "holds");
}

#[test]
fn malformed_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": \"x\", \"P\": ").unwrap();
    let out = run(&["analyze", &format!("file:{}", bad.display())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_family_exits_1() {
    assert_eq!(run(&["analyze", "airy:3"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "gevrey:x"]).status.code(), Some(1));
}

#[test]
fn invalid_parameter_is_a_hard_error() {
    assert_eq!(run(&["analyze", "qgevrey:0.5"]).status.code(), Some(2));
}

#[test]
fn conjugate_of_gevrey() {
    let got = log_m(&json(&run(&["transform", "gevrey:0.3", "conjugate"])));
    let want = log_m(&json(&run(&["transform", "gevrey:0.7"])));
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
    }
}

#[test]
fn empty_chain_is_identity_and_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let p = path.to_str().unwrap();
    let summary = json(&run(&["--P", "64", "--out", p, "transform", "gevrey:1.5"]));
    assert_eq!(summary["max_root_gap"].as_f64(), Some(0.0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let direct = json(&run(&["--P", "64", "transform", "gevrey:1.5"]));
    assert_eq!(log_m(&written), log_m(&direct));
    let again = json(&run(&["--P", "64", "transform", p]));
    assert_eq!(log_m(&again), log_m(&direct));
}

#[test]
fn chain_records_provenance() {
    let r = json(&run(&["--P", "64", "transform", "gevrey:2", "dual", "dual"]));
    assert_eq!(r["name"], "gevrey:2|dual|dual");
    let lm = log_m(&r);
    assert_eq!(lm.len(), 65);
    assert_eq!(lm[0], 0.0);
}

#[test]
fn unknown_transform_exits_1() {
    assert_eq!(run(&["transform", "gevrey:1", "fourier"]).status.code(), Some(1));
}

#[test]
fn compare_orders_gevrey_classes() {
    let r = json(&run(&["--P", "128", "compare", "gevrey:1", "gevrey:2"]));
    let rel = |name: &str| {
        r["relations"]
            .as_array()
            .unwrap()
            .iter()
            .find(|x| x[0] == name)
            .unwrap()[1]["status"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(rel("preceq"), "holds");
    assert_eq!(rel("approx"), "fails");
}

#[test]
fn verify_conjugate_passes() {
    let out = run(&["verify", "conjugate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
}

#[test]
fn unknown_suite_exits_1() {
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(1));
}

#[test]
fn same_seed_gives_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..2).map(|i| dir.path().join(format!("r{i}.json")).display().to_string()).collect();
    for p in &paths {
        run(&["--seed", "11", "--out", p, "verify", "dual"]);
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let (x, y) = (run(&["analyze", "gevrey:0.5"]), run(&["analyze", "gevrey:0.5"]));
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn floats_carry_17_significant_digits() {
    let out = run(&["--P", "8", "transform", "gevrey:1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    // ln 2! = ln 2
    assert!(text.contains("6.9314718055994"), "{text}");
    let mantissa = text.split("\"logM\":[0.0,0.0,").nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17);
}

#[test]
fn markin_csv_trace() {
    let out = run(&["--format", "csv", "markin", "--terms", "6", "--t", "1,2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,ln_k,ln_eps,ln_c,ln_term_t1,ln_term_t2"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], (i + 1).to_string());
        // ε_n = 2^-(n+1)
        let ln_eps: f64 = r[2].parse().unwrap();
        assert!((ln_eps + (i as f64 + 2.0) * std::f64::consts::LN_2).abs() < 1e-12);
    }
}

#[test]
fn markin_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.json");
    std::fs::write(
        &cfg,
        r#"{"gauge":"markin","terms":8,"offset":22027,"t":[1.0],"members":[0.5]}"#,
    )
    .unwrap();
    let r = json(&run(&["markin", "--config", cfg.to_str().unwrap()]));
    assert_eq!(r["terms"], 8);
    assert_eq!(r["offset"], 22027);
    assert_eq!(r["l2"]["status"], "converged");
}

#[test]
fn file_window_wins_unless_p_is_given() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, r#"{"name":"g","P":64,"family":{"type":"gevrey","params":{"alpha":1.5}}}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(json(&run(&["analyze", p]))["P"], 64);
    assert_eq!(json(&run(&["--P", "128", "analyze", p]))["P"], 128);
}
