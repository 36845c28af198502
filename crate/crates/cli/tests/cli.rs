use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn kq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kq")).args(args).output().expect("kq runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn fixture(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kq-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write fixture");
    path
}

fn summary(o: &Output) -> Value {
    let text = stdout(o);
    serde_json::from_str(text.lines().last().expect("summary line")).expect("summary is JSON")
}

#[test]
fn graphs_counts_wedge_pair() {
    let o = kq(&["graphs", "--n", "1", "--m", "2", "--outdeg", "2"]);
    assert!(o.status.success());
    assert_eq!(summary(&o)["count"], 2);
    for line in stdout(&o).lines() {
        serde_json::from_str::<Value>(line).expect("every line is JSON");
    }
}

#[test]
fn graphs_relaxed_star_order_gives_nine() {
    let o = kq(&["graphs", "--n", "2", "--m", "2", "--dedup", "star-order", "--relaxed"]);
    assert!(o.status.success());
    assert_eq!(summary(&o)["count"], 9);
    let o = kq(&["graphs", "--n", "2", "--m", "2", "--dedup", "star-order"]);
    assert_eq!(summary(&o)["count"], 7);
}

#[test]
fn graphs_rejects_negative_dimension() {
    let o = kq(&["graphs", "--n", "0", "--m", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_file_exits_two() {
    let o = kq(&["weights", "--graph", "/nonexistent/kq/graph.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_json_exits_three() {
    let path = fixture("bad.json", "{\"n\": 1, \"m\": ");
    let o = kq(&["weights", "--graph", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn unsupported_ground_count_exits_four() {
    let path = fixture("m3.json", r#"{"n":2,"m":3,"stars":[[-1,-2],[-3,1]]}"#);
    let o = kq(&["weights", "--graph", path.to_str().unwrap(), "--samples", "100"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn order_beyond_maximum_exits_four() {
    let path = fixture("so3.json", &so3_json());
    let o = kq(&["star", "expand", "--poisson", path.to_str().unwrap(), "--order", "5"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn analytic_mode_without_closed_form_exits_four() {
    let path = fixture("so3-analytic.json", &so3_json());
    let o = kq(&["star", "expand", "--poisson", path.to_str().unwrap(), "--order", "2"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(o.stdout.is_empty());
}

#[test]
fn wedge_weight_estimate() {
    let path = fixture("wedge.json", r#"{"n":1,"m":2,"stars":[[-1,-2]]}"#);
    let o = kq(&["weights", "--graph", path.to_str().unwrap(), "--samples", "1e5", "--seed", "7"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).expect("JSON");
    let (mean, se) = (v["mean"].as_f64().unwrap(), v["std_error"].as_f64().unwrap());
    assert!((mean - 0.5).abs() <= 3.0 * se, "mean {mean} se {se}");
    assert_eq!(v["analytic_exact"], "1/2");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["samples"], 100_000);
    assert!(v["kq_version"].is_string());
}

#[test]
fn weight_estimates_are_deterministic() {
    let path = fixture("wedge-det.json", r#"{"n":1,"m":2,"stars":[[-1,-2]]}"#);
    let args = ["weights", "estimate", "--graph", path.to_str().unwrap(), "--samples", "20000", "--seed", "11"];
    assert_eq!(kq(&args).stdout, kq(&args).stdout);
}

#[test]
fn moyal_discrepancy_is_zero() {
    let o = kq(&["moyal", "--d", "2", "--order", "3"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).expect("JSON");
    assert_eq!(v["max_discrepancy"], 0.0);
}

#[test]
fn groenewold_suite_reports_resolved_sign() {
    let o = kq(&["verify", "--suite", "groenewold", "--cases", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("−3ħ² (i²-resolved)"));
}

#[test]
fn unknown_suite_is_an_input_error() {
    let o = kq(&["verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn so3_associator_vanishes_through_order_one() {
    let path = fixture("so3-verify.json", &so3_json());
    let o = kq(&["star", "verify", "--poisson", path.to_str().unwrap(), "--order", "2", "--weights", "mc"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).expect("JSON");
    let assoc = v["report"]["associator_on_monomials"].as_array().expect("per-order residuals");
    assert_eq!(assoc.len(), 3);
    assert_eq!(assoc[0], 0.0);
    assert_eq!(assoc[1], 0.0);
    assert!(assoc[2].as_f64().unwrap().is_finite());
    assert_eq!(v["header"]["samples"], 100_000);
}

fn so3_json() -> String {
    let comp = |i: u32, j: u32, exp: [u32; 3], c: &str| {
        format!(r#"{{"idx":[{i},{j}],"poly":{{"d":3,"terms":[[[{},{},{}],"{c}"]]}}}}"#, exp[0], exp[1], exp[2])
    };
    format!(
        r#"{{"d":3,"k":2,"coeffs":[{},{},{}]}}"#,
        comp(1, 2, [0, 0, 1], "1"),
        comp(2, 3, [1, 0, 0], "1"),
        comp(1, 3, [0, 1, 0], "-1")
    )
}
