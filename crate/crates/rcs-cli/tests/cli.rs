//! End-to-end checks of the `rcs` binary: exit codes, output formats, and
//! bit-for-bit agreement with direct library calls.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use robust_cs::{LambdaSchedule, RcsConfig, RcsTracker};

fn rcs() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rcs"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = rcs()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn rcs");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("wait for rcs")
}

#[test]
fn empty_input_prints_header_and_exits_zero() {
    let out = run_with_stdin(&["track", "-"], "");
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "t,x,lower,upper,estimate\n");
}

#[test]
fn three_symmetric_points_give_unbounded_interval_and_zero_estimate() {
    let out = run_with_stdin(
        &[
            "track", "-", "--lambda", "1", "--alpha", "0.05", "--sigma2", "1", "--epsilon", "0",
            "--query", "all",
        ],
        "-1\n0\n1\n",
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let last = stdout.lines().last().unwrap();
    // threshold log 40 exceeds 3 log 2, so the interval is still vacuous
    assert_eq!(last, "3,1,-inf,inf,0");
}

#[test]
fn unparseable_line_names_the_line_number_and_exits_3() {
    let out = run_with_stdin(&["track", "-", "--lambda", "0.5"], "0.2\n0.4\nnot-a-number\n");
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "stderr: {stderr}");
}

#[test]
fn missing_input_file_exits_4() {
    let out = rcs()
        .args(["track", "/no/such/file", "--lambda", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = rcs().args(["track", "-", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn track_matches_library_bit_for_bit() {
    // a contaminated-looking synthetic stream
    let mut x = 0.37f64;
    let xs: Vec<f64> = (0..400)
        .map(|i| {
            x = (x * 1.9 + i as f64 * 0.11).sin() * 3.0;
            if i % 17 == 0 {
                x + 40.0
            } else {
                x
            }
        })
        .collect();
    let stream = xs.iter().map(|v| format!("{v}\n")).collect::<String>();

    let out = run_with_stdin(
        &[
            "track", "-", "--sigma2", "9", "--epsilon", "0.111", "--alpha", "0.05", "--lambda",
            "0.0556", "--query", "geom:1.3",
        ],
        &stream,
    );
    assert!(out.status.success());
    let cli_output = String::from_utf8_lossy(&out.stdout).into_owned();

    // replicate through the library with the same query rule
    let cfg = RcsConfig::with_variance(9.0, 0.111, 0.05).unwrap();
    let mut tracker = RcsTracker::new(cfg, LambdaSchedule::constant(0.0556).unwrap()).unwrap();
    let fmt = |v: f64| {
        if v == f64::INFINITY {
            "inf".to_string()
        } else if v == f64::NEG_INFINITY {
            "-inf".to_string()
        } else {
            format!("{v}")
        }
    };
    let mut expected = String::from("t,x,lower,upper,estimate\n");
    let mut next_query = 1u64;
    let mut last_emitted = 0u64;
    for &x in &xs {
        tracker.update(x).unwrap();
        let t = tracker.t();
        if t >= next_query {
            let ci = tracker.query_interval().unwrap();
            let est = tracker.point_estimate().unwrap();
            expected.push_str(&format!(
                "{},{},{},{},{}\n",
                t,
                fmt(x),
                fmt(ci.lower),
                fmt(ci.upper),
                fmt(est)
            ));
            last_emitted = t;
            next_query = ((t as f64 * 1.3).ceil() as u64).max(t + 1);
        }
    }
    let t = tracker.t();
    if last_emitted < t {
        let ci = tracker.query_interval().unwrap();
        let est = tracker.point_estimate().unwrap();
        expected.push_str(&format!(
            "{},{},{},{},{}\n",
            t,
            fmt(*xs.last().unwrap()),
            fmt(ci.lower),
            fmt(ci.upper),
            fmt(est)
        ));
    }
    assert_eq!(cli_output, expected);
}

#[test]
fn figure_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let status = rcs()
            .args([
                "figure",
                "fig2",
                "--horizon",
                "300",
                "--out-dir",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let fa = std::fs::read(a.join("fig2.csv")).unwrap();
    let fb = std::fs::read(b.join("fig2.csv")).unwrap();
    assert_eq!(fa, fb);
    let text = String::from_utf8(fa).unwrap();
    assert!(text.starts_with("t,series,lower,upper\n"));
    assert!(text.contains(",rcs,"));
    assert!(text.contains(",nonrobust,"));
}

#[test]
fn figure_respects_out_dir_env() {
    let dir = tempfile::tempdir().unwrap();
    let status = rcs()
        .args(["figure", "fig3", "--horizon", "120"])
        .env("RCS_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    for series in ["u=-0.5", "u=-0.25", "u=0,", "u=0.25"] {
        assert!(text.contains(series), "missing series {series}");
    }
}

#[test]
fn simulate_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.json");
    std::fs::write(
        &config_path,
        r#"{
            "model": {"type": "huber_mixture",
                      "clean": {"type": "gaussian", "mean": 0.0, "variance": 9.0},
                      "contaminant": {"type": "stable_levy", "stability": 0.75, "skew": 0.5, "location": 0.0, "scale": 1.0},
                      "epsilon": 0.1111111111111111},
            "method": "rcs",
            "cfg": {"p": 2.0, "kappa": 9.0, "epsilon": 0.1111111111111111, "alpha": 0.05},
            "lambda": {"type": "constant", "value": 0.05555555555555555},
            "horizon": 300,
            "n_reps": 4,
            "base_seed": 17
        }"#,
    )
    .unwrap();
    let out = rcs()
        .args([
            "simulate",
            config_path.to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("exp.csv")).unwrap();
    assert!(csv.starts_with("rep,t,lower,upper,width,covered\n"));
    let summary = std::fs::read_to_string(dir.path().join("exp_summary.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(parsed["method"], "rcs");
    assert_eq!(parsed["n_reps"], 4);
    assert!(parsed["ever_miscover_rate"].as_f64().unwrap() <= 1.0);
}

#[test]
fn simulate_rejects_bad_config_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    std::fs::write(&config_path, "{ not json").unwrap();
    let out = rcs()
        .args(["simulate", config_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compare_combines_methods() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("cmp.json");
    std::fs::write(
        &config_path,
        r#"{
            "methods": ["rcs", "nonrobust"],
            "model": {"type": "clean", "clean": {"type": "gaussian", "mean": 0.0, "variance": 1.0}},
            "cfg": {"p": 2.0, "kappa": 1.0, "epsilon": 0.04, "alpha": 0.05},
            "lambda": {"type": "constant", "value": 0.1},
            "horizon": 200,
            "n_reps": 3,
            "base_seed": 5
        }"#,
    )
    .unwrap();
    let out = rcs()
        .args([
            "compare",
            config_path.to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    assert!(csv.starts_with("method,rep,t,lower,upper,width,covered\n"));
    assert!(csv.contains("\nrcs,"));
    assert!(csv.contains("\nnonrobust,"));
    let summaries: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cmp_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summaries.as_array().unwrap().len(), 2);
}
