use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kronrank() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kronrank"));
    cmd.env_remove("KRONRANK_DENSE_CAP");
    cmd
}

fn run(args: &[&str]) -> Output {
    kronrank().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kronrank-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(path: &Path, text: &str) -> String {
    std::fs::write(path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_then_compute_round_trip() {
    let path = scratch("gen.json");
    let p = path.to_str().unwrap();
    let out = run(&[
        "generate",
        "--n",
        "3",
        "--f",
        "2",
        "--seed",
        "42",
        "--profile",
        "INTEGER_SMALL",
        "--mode",
        "exact",
        "-o",
        p,
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["compute", p, "--mode", "exact", "--json", "--echo"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["N"], 3);
    assert_eq!(v["F"], 2);
    assert_eq!(v["det_a"].as_array().unwrap().len(), 3);
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["instance"], original);

    let text = run(&["compute", p]);
    assert_eq!(text.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&text.stdout).contains("det G:"));
}

#[test]
fn verify_file_and_sweep() {
    let path = scratch("verify.json");
    let p = path.to_str().unwrap();
    assert!(run(&["generate", "--n", "2", "--f", "3", "-o", p]).status.success());
    let out = run(&["verify", p, "--json", "--all-records"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["records"][0]["passed"], true);

    let out = run(&[
        "verify",
        "--n",
        "1-3",
        "--f",
        "1-3",
        "--seeds",
        "4",
        "--mode",
        "exact",
        "--profile",
        "INTEGER_SMALL",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["total"], 36);
    assert_eq!(v["records"].as_array().unwrap().len(), 0);
}

#[test]
fn corrupted_oracle_fails_verification() {
    let out = run(&[
        "verify",
        "--n",
        "2",
        "--f",
        "2",
        "--seeds",
        "3",
        "--debug-corrupt",
        "1,2,0.5",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["failed"], 3);
    assert_eq!(v["records"][0]["corruption"]["row"], 1);
}

#[test]
fn parse_errors_exit_2() {
    let bad = write(&scratch("bad.json"), "{not json");
    assert_eq!(run(&["compute", &bad]).status.code(), Some(2));
    assert_eq!(run(&["compute", "/nonexistent/instance.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--n", "x"]).status.code(), Some(2));
    let out = run(&["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn validation_errors_exit_3() {
    let shape = write(
        &scratch("shape.json"),
        r#"{"F": 2, "N": 1, "A": [[[1]]], "X": [[1]], "Y": [[1]]}"#,
    );
    let out = run(&["compute", &shape]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let nan = write(
        &scratch("nan.json"),
        r#"{"F": 1, "N": 1, "A": [["nan"]], "X": [[1]], "Y": [[1]]}"#,
    );
    let code = run(&["compute", &nan]).status.code();
    assert!(code == Some(2) || code == Some(3), "{code:?}");
}

#[test]
fn resource_limits_exit_4() {
    let out = kronrank()
        .env("KRONRANK_DENSE_CAP", "4")
        .args(["verify", "--n", "3", "--f", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    // the flag takes precedence over the environment
    let out = kronrank()
        .env("KRONRANK_DENSE_CAP", "4")
        .args(["verify", "--n", "3", "--f", "2", "--cap", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        run(&["expand", "--n", "5", "--f", "3", "--checks", "cdiag"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn expand_reports_every_check() {
    let out = run(&["expand", "--n", "2", "--f", "3", "--seed", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert_eq!(names, ["detb", "cdiag", "sumdiag", "ypower", "columns", "full-leibniz"]);
    let sumdiag = checks.iter().find(|c| c["check"] == "sumdiag").unwrap();
    assert_eq!(sumdiag["count"], 8);

    let out = run(&[
        "expand",
        "--n",
        "2",
        "--f",
        "2",
        "--checks",
        "ypower,detb",
        "--mode",
        "float",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 2);
}

#[test]
fn bench_csv_and_json() {
    let out = run(&["bench", "--sizes", "2,3x2", "--reps", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,F,NF,t_closed_ns,t_dense_ns,speedup"));
    assert!(lines.next().unwrap().starts_with("2,2,4,"));
    assert!(lines.next().unwrap().starts_with("3,2,6,"));

    let out = run(&["bench", "--sizes", "2", "--reps", "1", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v[0]["NF"], 4);
    assert!(v[0]["speedup"].as_f64().unwrap() > 0.0);
}

fn generated(name: &str, args: &[&str]) -> String {
    let path = scratch(name);
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &p]);
    assert!(run(&full).status.success());
    p
}

#[test]
fn compute_identity_and_singular_reports() {
    let id = generated("identity.json", &["--n", "3", "--f", "2", "--profile", "IDENTITY"]);
    let v = stdout_json(&run(&["compute", &id, "--json"]));
    assert_eq!(v["total"]["sign"], 1);
    assert_eq!(v["total"]["log_abs"], 0.0);
    assert_eq!(v["total"]["value"], 1.0);

    let sing = generated(
        "singular.json",
        &["--n", "3", "--f", "2", "--profile", "SINGULAR_A", "--mode", "exact"],
    );
    let v = stdout_json(&run(&["compute", &sing, "--mode", "exact", "--json"]));
    assert_eq!(v["total"]["sign"], 0);
    assert_eq!(v["total"]["log_abs"], Value::Null);
    let zeros = v["zero_factors"].as_array().unwrap();
    assert_eq!(zeros.len(), 1);
    assert!(zeros[0].as_str().unwrap().starts_with("A["));
}

#[test]
fn compute_matches_library_call() {
    use kronrank_core::generator::{random_instance, Profile};
    use kronrank_core::{closed_form_det, io::parse_instance};
    let path = generated("seed42.json", &["--n", "3", "--f", "2", "--seed", "42"]);
    let v = stdout_json(&run(&["compute", &path, "--json"]));
    let inst = parse_instance::<f64>(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(inst, random_instance::<f64>(3, 2, 42, Profile::Uniform).unwrap());
    let b = closed_form_det(&inst);
    assert_eq!(v["total"]["sign"], b.total.sign_log.sign());
    assert_eq!(v["total"]["log_abs"].as_f64(), b.total.sign_log.log_abs());
    for (k, d) in b.det_a.iter().enumerate() {
        assert_eq!(v["det_a"][k]["log_abs"].as_f64(), d.sign_log.log_abs());
    }
}

#[test]
fn expand_tuple_counts() {
    let v = stdout_json(&run(&["expand", "--n", "3", "--f", "2", "--json"]));
    assert_eq!(v["passed"], true);
    let sumdiag = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == "sumdiag")
        .unwrap()
        .clone();
    assert_eq!(sumdiag["count"], 36);

    let out = run(&["expand", "--n", "4", "--f", "3", "--checks", "sumdiag"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("count=13824"));
}

#[test]
fn bench_repetitions_change_only_timings() {
    let one = stdout_json(&run(&["bench", "--sizes", "2,3", "--reps", "1", "--json"]));
    let five = stdout_json(&run(&["bench", "--sizes", "2,3", "--reps", "5", "--json"]));
    for (a, b) in one.as_array().unwrap().iter().zip(five.as_array().unwrap()) {
        assert_eq!((&a["N"], &a["F"], &a["NF"]), (&b["N"], &b["F"], &b["NF"]));
    }
}
