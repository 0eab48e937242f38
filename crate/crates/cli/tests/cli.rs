use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn invlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invlab"))
        .args(args)
        .env_remove("INVLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn write(path: &Path, text: &str) -> String {
    std::fs::write(path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn error_record(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("JSON error record on stderr")
}

#[test]
fn pipeline_reproduces_experiment_backward_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let common = ["--n", "64", "--sigma1", "1e3", "--sigman", "1e-3", "--seed", "5"];
    let mut args = vec!["gen", "--out", d];
    args.extend(common);
    assert!(invlab(&args).status.success());
    let manifest: Value = serde_json::from_slice(&std::fs::read(dir.path().join("problem.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["n"], 64);

    let a = format!("{d}/A.txt");
    let v = format!("{d}/V.txt");
    let out = invlab(&["invert", &a, "--method", "rows-gepp", "--out", &v]);
    assert!(out.status.success());
    let solved = json(&invlab(&[
        "solve",
        &a,
        &format!("{d}/b.txt"),
        "--via-inverse",
        "--inverse",
        &v,
        "--reference",
        &format!("{d}/x_ref.txt"),
    ]));

    let mut args = vec!["accuracy", "--method", "rows-gepp"];
    args.extend(common);
    let record = json(&invlab(&args));
    let expected = &record["random_b"]["via_inverse"];
    assert_eq!(solved["via"], "inverse");
    assert_eq!(solved["backward_error"].as_f64(), expected["backward_error"].as_f64());
    assert_eq!(solved["forward_error_rel"].as_f64(), expected["forward_error_rel"].as_f64());
    assert_eq!(solved["residual_norm"].as_f64(), expected["residual_norm"].as_f64());
}

#[test]
fn identity_solve_returns_rhs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(&dir.path().join("I.txt"), "3 3\n1 0 0\n0 1 0\n0 0 1\n");
    let b = write(&dir.path().join("b.txt"), "3 1\n0.1\n-2\n3e5\n");
    for via in ["--via-lu", "--via-qr", "--via-inverse"] {
        let r = json(&invlab(&["solve", &a, &b, via]));
        let x: Vec<f64> = r["x_v"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        assert_eq!(x, vec![0.1, -2.0, 3e5], "{via}");
        assert_eq!(r["backward_error"].as_f64(), Some(0.0));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let singular = write(&dir.path().join("s.txt"), "2 2\n1 2\n2 4\n");
    let garbage = write(&dir.path().join("g.txt"), "2 2\n1 x\n2 4\n");
    let rect = write(&dir.path().join("r.txt"), "2 3\n1 2 3\n4 5 6\n");
    let b3 = write(&dir.path().join("b3.txt"), "3 1\n1\n2\n3\n");
    let eye = write(&dir.path().join("i.txt"), "2 2\n1 0\n0 1\n");
    let three = write(&dir.path().join("t.txt"), "3 3\n1 0 0\n0 1 0\n0 0 1\n");

    let out = invlab(&["invert", &singular]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(error_record(&out)["error"], "singular_matrix");
    assert_eq!(invlab(&["invert", &garbage]).status.code(), Some(3));
    assert_eq!(invlab(&["invert", &rect]).status.code(), Some(4));
    assert_eq!(invlab(&["solve", &eye, &b3, "--via-lu"]).status.code(), Some(4));
    assert_eq!(invlab(&["invert", &three, "--method", "strassen"]).status.code(), Some(4));
    assert_eq!(invlab(&["solve", &eye, &b3]).status.code(), Some(2));
    assert_eq!(invlab(&["accuracy", "--method", "lu-magic"]).status.code(), Some(2));
    assert_eq!(invlab(&["accuracy", "--n", "1"]).status.code(), Some(2));
    assert_eq!(invlab(&["invert", "/nonexistent/A.txt"]).status.code(), Some(1));
    let out = invlab(&["invert", &singular, "--method", "newton-left"]);
    assert_eq!(out.status.code(), Some(6));
    assert_eq!(error_record(&out)["error"], "non_convergence");
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |seed_env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_invlab"));
        c.args(args).env_remove("INVLAB_SEED");
        if let Some(s) = seed_env {
            c.env("INVLAB_SEED", s);
        }
        json(&c.output().unwrap())
    };
    let small = ["accuracy", "--n", "16", "--sigma1", "10", "--sigman", "0.1"];
    let from_env = run(Some("7"), &small);
    assert_eq!(from_env["config"]["seed"], 7);
    let mut explicit = small.to_vec();
    explicit.extend(["--seed", "7"]);
    assert_eq!(run(None, &explicit), from_env);
    let last = explicit.len() - 1;
    explicit[last] = "3";
    assert_eq!(run(Some("7"), &explicit)["config"]["seed"], 3);
}

#[test]
fn csv_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let out = invlab(&["fig1", "--n", "16", "--sigma1", "1e2", "--sigman", "1e-2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row_label,j,sigma_j,magnitude"));
    assert_eq!(lines.count(), 3 * 16);

    let csv = invlab(&["accuracy", "--n", "16", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("\nrandom_b.via_inverse.backward_error,"));
}

#[test]
fn accuracy_at_defaults_is_quick_and_deterministic() {
    let start = std::time::Instant::now();
    let first = invlab(&["accuracy"]);
    assert!(start.elapsed().as_secs_f64() < 60.0);
    let record = json(&first);
    assert_eq!(record["config"]["n"], 256);
    assert_eq!(record["inverse"]["method"], "getri");
    assert!(record.get("timings").is_none());
    assert_eq!(invlab(&["accuracy"]).stdout, first.stdout);
    let timed = json(&invlab(&["accuracy", "--n", "16", "--timings"]));
    assert!(timed["timings"]["invert_s"].as_f64().unwrap() >= 0.0);
}
