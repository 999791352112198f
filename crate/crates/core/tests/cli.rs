use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn respart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_respart")).args(args).output().expect("running respart")
}

fn respart_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_respart"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn edge_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const K4: &str = "4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";

#[test]
fn count_examples() {
    let k4 = edge_file(K4);
    let path = k4.path().to_str().unwrap();
    assert_eq!(stdout(&respart(&["count", "--edges", path, "--q", "2", "--a", "0,2"])).trim(), "4");
    let listed = stdout(&respart(&["count", "--edges", path, "--q2", "odd-odd", "--enumerate"]));
    assert_eq!(listed.lines().count(), 5);
    let empty = edge_file("4 0\n");
    let out = respart(&["count", "--edges", empty.path().to_str().unwrap(), "--q", "2", "--a", "2,0"]);
    assert_eq!(stdout(&out).trim(), "8");
    let out = respart_stdin(&["count", "--q", "3", "--a", "3,0,0"], "3 3\n1 2\n2 3\n1 3\n");
    assert_eq!(stdout(&out).trim(), "1");
    let json: Value =
        serde_json::from_str(&stdout(&respart(&["count", "--edges", path, "--q2", "even-even", "--format", "json"])))
            .unwrap();
    assert_eq!(json["count"], "4");
    assert_eq!(json["engine"], "gf2");
}

#[test]
fn count_errors_exit_nonzero() {
    let bad = edge_file("3 1\n1 1\n");
    let out = respart(&["count", "--edges", bad.path().to_str().unwrap(), "--q2", "even-even"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert!(out.stdout.is_empty());
    let k4 = edge_file(K4);
    let out = respart(&["count", "--edges", k4.path().to_str().unwrap(), "--q", "3", "--a", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    let big = edge_file("30 0\n");
    let out = respart(&["count", "--edges", big.path().to_str().unwrap(), "--q", "3", "--a", "3,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q^n"));
}

#[test]
fn dist_examples() {
    let json: Value =
        serde_json::from_str(&stdout(&respart(&["dist", "--n", "2", "--q2", "odd-odd", "--format", "json"]))).unwrap();
    assert_eq!(json["support"], serde_json::json!(["0", "1"]));
    assert_eq!(json["mass_num"], serde_json::json!(["1", "1"]));
    assert_eq!(json["mass_den"], serde_json::json!(["2", "2"]));

    let z: Value = serde_json::from_str(&stdout(&respart(&[
        "dist", "--limit", "--kind", "Z", "--kmax", "20", "--format", "json",
    ])))
    .unwrap();
    assert_eq!(z["support"][0], "0");
    assert_eq!(z["mass_num"][0], "1");
    assert_eq!(z["mass_den"][0], "3");

    let table = stdout(&respart(&["dist", "--n", "4", "--q2", "even-even"]));
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 4);
    let csv = stdout(&respart(&["dist", "--n", "4", "--q2", "even-even", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(respart(&["dist", "--n", "3", "--q2", "odd-odd"]).status.code(), Some(2));
}

#[test]
fn moment_examples() {
    assert_eq!(stdout(&respart(&["moment", "--n", "2", "--q", "2", "--a", "2,0"])).lines().next(), Some("3/2"));
    let json: Value = serde_json::from_str(&stdout(&respart(&[
        "moment", "--n", "40", "--q", "3", "--a", "3,0,0", "--format", "json",
    ])))
    .unwrap();
    let v = json["value"].as_f64().unwrap();
    assert!((v - 1.0 / 6.0).abs() < 0.01, "{v}");
    assert_eq!(json["limit_mean"]["den"], "6");
    assert_eq!(stdout(&respart(&["moment", "--n", "3", "--q", "3", "--a", "3,0,0"])).lines().next(), Some("21/8"));
    let out = respart(&["moment", "--n", "500", "--q", "3", "--a", "3,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let args =
        ["simulate", "--n", "12", "--trials", "20000", "--q", "2", "--a", "1,1", "--seed", "7", "--compare", "exact"];
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_ms");
        v
    };
    let a = strip(&respart(&args));
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "1"]);
    let b = strip(&respart(&with_threads));
    assert_eq!(a, b);
    let tv = a["comparisons"][0]["tv"].as_f64().unwrap();
    assert!(tv < 0.05, "tv {tv}");

    let out =
        respart(&["simulate", "--n", "8", "--trials", "200", "--q", "3", "--a", "3,0,0", "--engine", "bruteforce"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let total: u64 = v["histogram"].as_array().unwrap().iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 200);
    let csv = stdout(&respart(&["simulate", "--n", "6", "--trials", "100", "--q2", "even-even", "--format", "csv"]));
    assert!(csv.starts_with("value,count,frequency\n"));
    let out = respart(&["simulate", "--n", "8", "--trials", "10", "--q", "3", "--a", "3,0,0", "--engine", "gf2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_algebra_examples() {
    let v: Value =
        serde_json::from_str(&stdout(&respart(&["verify-algebra", "--q", "3", "--k", "2", "--exhaustive"]))).unwrap();
    assert_eq!(v["lemma_audit"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["lemma_audit"]["sets_audited"], 511);
    assert_eq!(v["passed"], true);

    let v: Value = serde_json::from_str(&stdout(&respart(&["verify-algebra", "--gf-audit", "--terms", "60"]))).unwrap();
    assert!(v["generating_function"]["f_at_half_deviation"].as_f64().unwrap() < 1e-12);

    let v: Value =
        serde_json::from_str(&stdout(&respart(&["verify-algebra", "--conflict-bound", "--qmax", "64"]))).unwrap();
    assert_eq!(v["conflict_bound"]["all_hold"], true);

    let sampled = ["verify-algebra", "--q", "3", "--k", "3", "--sampled", "50", "--seed", "4"];
    assert_eq!(stdout(&respart(&sampled)), stdout(&respart(&sampled)));
    assert_eq!(respart(&["verify-algebra"]).status.code(), Some(2));
    assert_eq!(respart(&["verify-algebra", "--q", "3", "--k", "3", "--exhaustive"]).status.code(), Some(2));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out =
        respart(&["dist", "--n", "3", "--q2", "even-odd", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["support"].as_array().unwrap().len(), 3);
}
