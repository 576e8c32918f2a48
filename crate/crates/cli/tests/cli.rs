use std::process::{Command, Output};

use serde_json::Value;

fn mp2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mp2")).args(args).output().expect("runs")
}

fn mp2_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mp2")).args(args).env(key, val).output().expect("runs")
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.v1.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&v).expect("schema compiles")
}

fn json_ok(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)));
    let s = schema();
    if let Err(errs) = s.validate(&v) {
        let msgs: Vec<String> = errs.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("schema violations: {msgs:?}");
    }
    v
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn check_gauss_passes() {
    let o = mp2(&["check", "gauss", "--p", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_ok(&o);
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["summary"]["failed"], 0);
    assert!(v["summary"]["total"].as_u64().unwrap() > 0);
}

#[test]
fn check_cosets_count_four_at_m2() {
    let o = mp2(&["check", "cosets", "--p", "3", "--m", "2"]);
    assert_eq!(code(&o), 0);
    let v = json_ok(&o);
    let case = v["cases"].as_array().unwrap().iter().find(|c| c["key"] == "p3/m2").unwrap();
    assert_eq!(case["actual"]["count"], 4);
    assert_eq!(case["pass"], true);
}

#[test]
fn check_theta_documents_odd_weil_exception() {
    let o = mp2(&["check", "theta", "--grid", "default"]);
    assert_eq!(code(&o), 0);
    let v = json_ok(&o);
    let odd: Vec<&Value> = v["cases"].as_array().unwrap().iter().filter(|c| c["key"].as_str().unwrap().contains("odd-weil")).collect();
    assert!(!odd.is_empty());
    for c in odd {
        assert_eq!(c["actual"]["match"], false);
        assert_eq!(c["pass"], true);
        assert!(c["note"].as_str().unwrap().starts_with("expected fail"));
    }
}

#[test]
fn sampled_checks_record_seed() {
    let o = mp2(&["check", "cocycle", "--p", "3", "--samples", "50", "--seed", "42"]);
    assert_eq!(code(&o), 0);
    let v = json_ok(&o);
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["cases"][0]["inputs"]["seed"], 42);
}

#[test]
fn table_dims_unramified_ps() {
    let o = mp2(&["table", "dims", "--p", "3", "--repr", "ps:0:0", "--m-max", "3"]);
    assert_eq!(code(&o), 0);
    let v = json_ok(&o);
    let dims: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r[1].as_str().unwrap()).collect();
    assert_eq!(dims, ["1", "2", "4", "6"]);
}

#[test]
fn table_newforms_steinberg_both_ramified() {
    let o = mp2(&["table", "newforms", "--p", "5", "--repr", "steinberg:pi"]);
    assert_eq!(code(&o), 0);
    let v = json_ok(&o);
    let dims: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r[1].as_str().unwrap()).collect();
    assert_eq!(dims, ["2", "1"]);
}

#[test]
fn table_conductors_even_weil() {
    let o = mp2(&["table", "conductors", "--p", "3", "--family", "even-weil"]);
    assert_eq!(code(&o), 0);
    let v = json_ok(&o);
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        assert!(r[0].as_str().unwrap().starts_with("even-weil"));
        if r[4] != "-" {
            assert_eq!(r[3], r[4], "{r:?}");
        }
    }
}

#[test]
fn csv_and_markdown() {
    let o = mp2(&["--format", "csv", "table", "dims", "--p", "3", "--repr", "ps:0:0", "--m-max", "1"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "m,dim\n0,1\n1,2\n");
    let o = mp2(&["--format", "md", "check", "hilbert", "--p", "3"]);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("# hilbert (16/16 passed"));
}

#[test]
fn byte_deterministic_across_runs_and_threads() {
    let args = ["check", "rs-sum", "--p", "3"];
    let a = mp2(&args);
    let b = mp2(&args);
    let c = mp2(&["check", "rs-sum", "--p", "3", "--sequential"]);
    let d = mp2_env(&args, "MP2_THREADS", "1");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&c), 0);
    // The config header records nothing about scheduling.
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(a.stdout, d.stdout);
}

#[test]
fn timings_only_on_request() {
    let v = json_ok(&mp2(&["check", "hilbert", "--p", "3"]));
    assert!(v.get("elapsed_ms").is_none());
    let v = json_ok(&mp2(&["--timings", "check", "hilbert", "--p", "3"]));
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn gauss_eval_json() {
    let o = mp2(&["gauss", "eval", "--variant", "g", "--p", "3", "--chi", "0:0", "--psi", "1"]);
    assert_eq!(code(&o), 0);
    let v = json_ok(&o);
    assert_eq!(v["value"], "-1/3");
    assert_eq!(v["mag_sq"], "1/9");
    assert_eq!(v["zero"], false);
    let chi = serde_json::to_string(&v["inputs"]["chi"]).unwrap();
    let o2 = mp2(&["gauss", "eval", "--chi", &chi, "--psi", "1"]);
    assert_eq!(json_ok(&o2)["value"], "-1/3");
    let o = mp2(&["gauss", "eval", "--variant", "h", "--p", "5", "--chi", "1:2", "--psi", "2"]);
    assert_eq!(json_ok(&o)["zero"], true);
    let o = mp2(&["gauss", "eval", "--variant", "h", "--p", "5", "--chi", "1:2", "--psi", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_ok(&o)["zero"], false);
}

#[test]
fn oracle_commands() {
    let v = json_ok(&mp2(&["oracle", "cosets", "--p", "3", "--m", "2"]));
    assert_eq!(v["count"], 4);
    assert_eq!(v["verified"], true);
    let o = mp2(&["oracle", "weil", "--p", "3", "--eps", "0", "--chi", "xi", "--eta-conductor", "1", "--eta-exp", "0", "--m", "4"]);
    assert_eq!(code(&o), 0);
    let v = json_ok(&o);
    assert_eq!(v["match"], true);
    let v = json_ok(&mp2(&["conductor", "--p", "3", "--repr", "sc:0:1:0:+"]));
    assert_eq!(v["conductor"], "3");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&mp2(&["table", "dims", "--p", "3", "--repr", "bogus"])), 2);
    assert_eq!(code(&mp2(&["table", "dims", "--p", "4", "--repr", "ps:0:0"])), 2);
    assert_eq!(code(&mp2(&["table", "dims", "--p", "3", "--repr", "ps:0:0:1/2:1/2"])), 2);
    assert_eq!(code(&mp2(&["check", "nonsense"])), 2);
    assert_eq!(code(&mp2(&["frobnicate"])), 2);
    assert_eq!(code(&mp2_env(&["check", "hilbert"], "MP2_THREADS", "zero")), 2);
    assert_eq!(code(&mp2(&["gauss", "eval", "--p", "11", "--chi", "0:0", "--psi", "8"])), 3);
    let o = mp2(&["check", "cosets", "--p", "31", "--m", "2"]);
    assert_eq!(code(&o), 3);
    let v = json_ok(&o);
    assert!(v["truncated"].is_string());
    assert_eq!(v["summary"]["total"], 2);
}
