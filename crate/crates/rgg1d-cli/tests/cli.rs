//! End-to-end behavior of the `rgg1d` binary: exit codes, output formats,
//! and byte-level reproducibility.

use std::process::{Command, Output};

fn rgg1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rgg1d"))
        .args(args)
        .env("RGG1D_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = rgg1d(args);
    assert!(
        out.status.success(),
        "command failed: {:?}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn exact_connectivity_json_value() {
    let v = json(&[
        "exact",
        "connectivity",
        "--n",
        "5",
        "--lambda",
        "1",
        "--r",
        "1",
    ]);
    let p = v["results"]["p_connected"].as_f64().unwrap();
    assert!((p - 0.5098476970878892).abs() < 1e-12);
    assert!(v["seed"].is_null());
    assert_eq!(v["command"], "exact connectivity");
    assert_eq!(v["params"]["n"], 5);
}

#[test]
fn exact_connectivity_trivial_case() {
    let v = json(&[
        "exact",
        "connectivity",
        "--n",
        "1",
        "--lambda",
        "1",
        "--r",
        "0",
    ]);
    assert_eq!(v["results"]["p_connected"].as_f64().unwrap(), 1.0);
}

#[test]
fn unknown_subcommand_exits_one_with_usage() {
    let out = rgg1d(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "stderr: {stderr}");
}

#[test]
fn unknown_flag_exits_one() {
    let out = rgg1d(&["exact", "connectivity", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_required_flag_exits_one() {
    let out = rgg1d(&["exact", "connectivity", "--lambda", "1", "--r", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));
}

#[test]
fn invalid_params_exit_one() {
    let out = rgg1d(&[
        "exact",
        "connectivity",
        "--n",
        "0",
        "--lambda",
        "1",
        "--r",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be >= 1"));
}

#[test]
fn help_exits_zero() {
    let out = rgg1d(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn simulate_is_byte_reproducible_and_seeded() {
    let args = [
        "simulate",
        "--model",
        "exponential",
        "--statistic",
        "connectivity",
        "--n",
        "10",
        "--lambda",
        "1",
        "--r",
        "1",
        "--samples",
        "20000",
        "--seed",
        "123",
    ];
    let a = rgg1d(&args);
    let b = rgg1d(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "simulate output must be byte-identical");
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 123);
}

#[test]
fn simulate_exercises_every_model() {
    for model in ["exponential", "double-exponential", "truncated", "gstar"] {
        let mut args = vec![
            "simulate",
            "--model",
            model,
            "--statistic",
            "span",
            "--n",
            "50",
            "--lambda",
            "1",
            "--r",
            "0.5",
            "--samples",
            "500",
            "--seed",
            "1",
        ];
        if matches!(model, "truncated" | "gstar") {
            args.extend(["--T", "1"]);
        }
        let v = json(&args);
        assert!(
            v["results"]["mean"].as_f64().unwrap() >= 0.0,
            "model {model}"
        );
    }
}

#[test]
fn csv_format_has_schema_and_is_reproducible() {
    let args = [
        "sweep",
        "--lambda",
        "1",
        "--T",
        "1",
        "--n-values",
        "100,200",
        "--a-values",
        "0.5,1.5",
        "--samples",
        "2000",
        "--seed",
        "9",
        "--format",
        "csv",
    ];
    let a = rgg1d(&args);
    assert!(a.status.success());
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "statistic,n,lambda,r,T,a,value,stderr,seed"
    );
    // 2 models x 2 n x 2 a x (estimate + prediction) rows
    assert_eq!(lines.count(), 16);
    let b = rgg1d(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join("rgg1d-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("record.json");
    let _ = std::fs::remove_file(&path);
    let out = rgg1d(&[
        "exact",
        "degree-limit",
        "--lambda",
        "1",
        "--r",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let contents = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&contents).unwrap();
    assert!(
        (v["results"]["degree_count_limit"].as_f64().unwrap() - 0.4254590641196608).abs() < 1e-12
    );
}

#[test]
fn limit_commands_have_no_seed() {
    let v = json(&["limit", "pc", "--lambda", "1", "--r", "1", "--tol", "1e-12"]);
    assert!(v["seed"].is_null());
    assert!(
        (v["results"]["p_connected_limit"].as_f64().unwrap() - 0.5044286547259664).abs() < 1e-9
    );

    let v = json(&["limit", "tail", "--s", "1", "--lambda", "1", "--r", "1"]);
    assert!((v["results"]["probability"].as_f64().unwrap() - 0.2935657273279424).abs() < 1e-9);

    let v = json(&["limit", "components", "--lambda", "1", "--r", "1"]);
    let total = v["results"]["total"].as_f64().unwrap();
    assert!((total - 1.0).abs() < 1e-8);

    let v = json(&["limit", "size-m", "--m", "1", "--lambda", "1", "--r", "1"]);
    assert!(v["results"]["probs"].as_array().unwrap().len() > 3);
}

#[test]
fn components_and_redundant_pmfs() {
    let v = json(&["components", "--n", "5", "--lambda", "1", "--r", "1"]);
    let probs = v["results"]["probs"].as_array().unwrap();
    assert_eq!(probs.len(), 5);
    assert!((probs[0].as_f64().unwrap() - 0.5098476970878892).abs() < 1e-12);

    let v = json(&["redundant", "--n", "3", "--lambda", "1", "--r", "1"]);
    let probs = v["results"]["probs"].as_array().unwrap();
    assert!((probs[1].as_f64().unwrap() - 0.7310585786300049).abs() < 1e-9);
}

#[test]
fn trajectory_and_span_ks_run_small() {
    let v = json(&[
        "trajectory",
        "--model",
        "truncated",
        "--lambda",
        "1",
        "--T",
        "1",
        "--n-values",
        "50,100",
        "--num-seeds",
        "3",
        "--seed",
        "5",
    ]);
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 6);

    let v = json(&[
        "span-ks",
        "--n",
        "500",
        "--lambda",
        "1",
        "--samples",
        "500",
        "--seed",
        "3",
        "--threshold",
        "0.2",
    ]);
    assert!(v["results"]["ks_statistic"].as_f64().unwrap() < 0.2);
}

#[test]
fn restricted_warns_when_hypothesis_fails() {
    let out = rgg1d(&[
        "restricted",
        "--lambda",
        "1",
        "--r",
        "1",
        "--a",
        "0.5",
        "--n-values",
        "100",
        "--samples",
        "1000",
        "--seed",
        "2",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn threads_env_never_changes_results() {
    let args = [
        "simulate",
        "--statistic",
        "num_holes",
        "--n",
        "30",
        "--lambda",
        "1",
        "--r",
        "1",
        "--samples",
        "30000",
        "--seed",
        "77",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_rgg1d"))
            .args(args)
            .env("RGG1D_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let two = run("2");
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
}
