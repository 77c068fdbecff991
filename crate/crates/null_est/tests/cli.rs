//! End-to-end CLI tests: exit codes, output formats, and the parse
//! round-trip guarantee.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_null-est"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("null-est-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn null-est")
}

#[test]
fn estimate_end_to_end_and_roundtrip() {
    let dir = tmpdir("estimate");
    let data = dir.join("data.txt");
    let status = run(&[
        "simulate",
        "--n",
        "1000",
        "--k",
        "10",
        "--theta",
        "1.5",
        "--sigma2",
        "4",
        "--seed",
        "11",
        "-o",
        data.to_str().unwrap(),
    ]);
    assert!(status.status.success());

    let out = run(&["estimate", "-i", data.to_str().unwrap(), "--k", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let theta = parsed["theta_hat"].as_f64().unwrap();
    let sigma2 = parsed["sigma2_hat"].as_f64().unwrap();
    assert!((theta - 1.5).abs() < 0.3, "theta_hat {theta}");
    assert!((sigma2 - 4.0).abs() < 0.5, "sigma2_hat {sigma2}");
    assert_eq!(parsed["k_used_or_adaptive"], 10);
    assert!(parsed["tau"].as_f64().unwrap() > 0.0);
    assert!(parsed["pilot_sigma2"].as_f64().unwrap() > 0.0);
    assert!(parsed["tv_rate_bound"].as_f64().unwrap() > 0.0);

    // round trip: every printed number re-serializes to the exact bytes
    // that were printed (shortest round-trip decimals)
    for field in ["theta_hat", "sigma2_hat", "tau", "pilot_sigma2", "tv_rate_bound"] {
        let token = format!("\"{field}\":{}", serde_json::to_string(&parsed[field]).unwrap());
        assert!(text.contains(&token), "token `{token}` not found in {text}");
    }

    // field order is fixed
    let fields = ["theta_hat", "sigma2_hat", "k_used_or_adaptive", "tau", "pilot_sigma2"];
    let mut last = 0;
    for f in fields {
        let pos = text.find(f).unwrap();
        assert!(pos > last, "field order violated at {f}");
        last = pos;
    }
}

#[test]
fn estimate_adaptive_mode() {
    let dir = tmpdir("adaptive");
    let data = dir.join("data.txt");
    run(&[
        "simulate", "--n", "600", "--k", "60", "--theta", "-0.5", "--seed", "3", "-o",
        data.to_str().unwrap(),
    ]);
    let out = run(&["estimate", "-i", data.to_str().unwrap(), "--adaptive"]);
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["k_used_or_adaptive"], "adaptive");
}

#[test]
fn estimate_error_exit_codes() {
    let dir = tmpdir("errors");
    let empty = dir.join("empty.txt");
    fs::write(&empty, "").unwrap();
    let out = run(&["estimate", "-i", empty.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.join("bad.txt");
    fs::write(&bad, "1.0\nnot-a-number\n2.0\n").unwrap();
    let out = run(&["estimate", "-i", bad.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "stderr: {stderr}");

    let ok = dir.join("ok.txt");
    fs::write(&ok, "1.0\n2.0\n3.0\n4.0\n").unwrap();
    let out = run(&["estimate", "-i", ok.to_str().unwrap(), "--k", "4"]);
    assert_eq!(out.status.code(), Some(3));

    // comment lines are skipped
    fs::write(&ok, "# header\n0.9\n2.1\n0.4\n1.6\n-0.3\n0.8\n1.1\n0.2\n").unwrap();
    let out = run(&["estimate", "-i", ok.to_str().unwrap(), "--k", "1"]);
    assert!(out.status.success());
}

#[test]
fn sweep_minimal_csv_and_unknown_estimator() {
    let dir = tmpdir("sweep");
    let spec = dir.join("spec.json");
    fs::write(
        &spec,
        r#"{"n_list":[200],"k_rule":{"rule":"fixed","k":10},
            "contamination":{"kind":"constant-shift","value":10.0},
            "trials":2,"estimators":["median"],"seed":7,"theta":0.5,"sigma2":1.0}"#,
    )
    .unwrap();
    let out = run(&["sweep", "-i", spec.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(lines.len(), 2, "csv: {csv}");
    assert!(lines[0].starts_with("estimator,n,k,trials,median_err"));
    assert!(lines[1].starts_with("median,200,10,2,"));

    fs::write(
        &spec,
        r#"{"n_list":[200],"k_rule":{"rule":"sqrt-n"},
            "contamination":{"kind":"zero"},
            "trials":1,"estimators":["bogus"],"seed":7}"#,
    )
    .unwrap();
    let out = run(&["sweep", "-i", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_lowerbound_exit_codes() {
    // eps = 0.5 is the degenerate arm: both mixtures coincide, trivial pass
    let out = run(&["verify-lowerbound", "--eps", "0.5", "--n", "1000"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports[0]["cf_match_max"], 0.0);

    // oversized c0 violates the density contract
    let out = run(&["verify-lowerbound", "--eps", "0.3", "--n", "1000", "--set", "c0=0.5"]);
    assert_eq!(out.status.code(), Some(5));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("min_p1"), "stderr: {stderr}");
}

#[test]
fn rates_table() {
    let out = run(&["rates", "--n", "10000", "--k", "10,2500", "--format", "csv"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("k,n,location_rate_sq"));
    assert!(csv.contains("10,10000,0.0001,0.0001,"));

    let out = run(&["rates", "--n", "100", "--k", "50"]);
    assert_eq!(out.status.code(), Some(3));
}
