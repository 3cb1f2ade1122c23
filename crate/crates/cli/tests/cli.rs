use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshroute")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    check_envelope(&v);
    v
}

fn schema() -> Value {
    serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap()
}

fn check_envelope(v: &Value) {
    let schema = schema();
    let obj = v.as_object().unwrap();
    for key in schema["required"].as_array().unwrap() {
        assert!(obj.contains_key(key.as_str().unwrap()), "missing {key}");
    }
    let allowed = schema["properties"].as_object().unwrap();
    assert!(obj.keys().all(|k| allowed.contains_key(k)));
    assert!(schema["properties"]["command"]["enum"].as_array().unwrap().contains(&v["command"]));
    assert!(v["result"].is_object());
    assert!(v["mesh"].is_null() || v["mesh"].as_str().unwrap().contains(':'));
}

fn temp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("meshroute-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn trace_all_cross() {
    let v = report(&["trace", "--mesh", "square:2x2", "--config", "111111111111"]);
    let r = &v["result"];
    assert_eq!(r["paths"].as_array().unwrap().len(), 8);
    assert_eq!(r["stats"]["sum"], 24);
    assert_eq!(r["stats"]["k0"], 4);
    assert_eq!(r["stats"]["mean"]["exact"], "3");
}

#[test]
fn trace_reads_config_file_and_writes_svg() {
    let cfg = temp("cfg.txt");
    std::fs::write(&cfg, "0000\n").unwrap();
    let svg = temp("trace.svg");
    let v = report(&[
        "trace",
        "--mesh",
        "square:1x1",
        "--config",
        cfg.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(v["result"]["stats"]["lengths"], serde_json::json!([1, 1, 1, 1]));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml") && text.contains("<svg") && text.contains("#d62728"));
}

#[test]
fn realizable_single_and_all() {
    let v = report(&["realizable", "--mesh", "square:2x3", "--x", "3"]);
    assert_eq!(v["result"]["realizable"], false);
    let v = report(&["realizable", "--mesh", "square:2x2", "--all"]);
    assert_eq!(v["result"]["max_length"], 17);
    let lengths = v["result"]["lengths"].as_array().unwrap();
    assert!(!lengths.contains(&serde_json::json!(7)));
}

#[test]
fn construct_modes() {
    let v = report(&["construct", "--mesh", "square:3x3", "--x", "20"]);
    assert_eq!(v["result"]["path"]["length"], 20);
    let v = report(&["construct", "--mesh", "square:2x2", "--snake", "max"]);
    assert_eq!(v["result"]["path"]["length"], 17);
    let v = report(&["construct", "--mesh", "square:2x2", "--extremal", "4"]);
    assert_eq!(v["result"]["trace"]["stats"]["variance"]["exact"], "28");
}

#[test]
fn bounds_csv_header_and_inf() {
    let csv = temp("bounds.csv");
    report(&["bounds", "--mesh", "square:3x3", "--csv", csv.to_str().unwrap()]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,floor_component,count_component,C1,C2,y_bound"));
    assert_eq!(lines.next(), Some("1,inf,12,inf,inf,12"));
    assert_eq!(text.lines().count(), 1 + 37);
}

#[test]
fn oracle_tasks() {
    let v = report(&["oracle", "--mesh", "square:1x2", "--task", "lengths"]);
    assert_eq!(v["result"]["agrees"], true);
    let v = report(&["oracle", "--mesh", "square:1x2", "--task", "maxy", "--jobs", "2"]);
    assert_eq!(v["result"]["bound_dominates"], true);
    let v = report(&["oracle", "--mesh", "square:1x1", "--task", "verify"]);
    assert_eq!(v["result"]["passed"], true);
}

#[test]
fn characterize_simulated_and_from_file() {
    let v = report(&["characterize", "--mesh", "square:2x2", "--simulate"]);
    let a = v["result"]["alpha_hat"].as_f64().unwrap();
    assert!((a - 0.99).abs() < 1e-12);
    let csv = temp("meas.csv");
    std::fs::write(&csv, "start,end,length,re,im\n0,1,1,0.5,0\n2,3,1,0.5,0\n4,5,1,0.5,0\n6,7,1,0.5,0\n").unwrap();
    let v = report(&["characterize", "--mesh", "square:1x1", "--measurements", csv.to_str().unwrap()]);
    assert_eq!(v["result"]["k0"], 0);
    assert!((v["result"]["alpha_hat"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn advise_modes() {
    let v = report(&["advise", "--lambda", "2,4,6,8"]);
    assert!(v["mesh"].is_null());
    assert_eq!(v["result"]["size"], 2);
    let v = report(&["advise", "--lambda", "[1,18]", "--grid", "2x2"]);
    assert_eq!(v["result"]["verdict"], "fails_necessary");
    let v = report(&["advise", "--lambda", "3,5,7,9,11,13", "--frontier", "10x10"]);
    assert!(v["result"]["minimal"].as_array().unwrap().contains(&serde_json::json!([1, 8])));
}

#[test]
fn errors_are_json_on_stderr() {
    let out = run(&["trace", "--mesh", "square:1x1", "--config", "0101"]);
    assert!(out.status.success());
    let out = run(&["trace", "--mesh", "square:1x1", "--config", "01"]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    let out = run(&["advise", "--lambda", "3,5,7,9,11,13"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "advisor");
}

#[test]
fn output_is_deterministic() {
    let args = ["construct", "--mesh", "hex:2x2", "--x", "11"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let a = temp("a.svg");
    let b = temp("b.svg");
    for p in [&a, &b] {
        report(&["trace", "--mesh", "tri:1x2", "--config", "10110", "--svg", p.to_str().unwrap()]);
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
