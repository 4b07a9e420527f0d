//! Integration tests for the command-line surface: exit codes, JSON
//! round-trips, flag/file precedence, and byte-level determinism.

use std::process::Command;

use regcomply::cli::{
    run, to_json_bytes, CommandKind, CommandOutput, RunConfig, RunReport, WeightsSpec,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regcomply"))
}

fn strip_timestamp(json: &str) -> String {
    let start = json.find("\"timestamp\":").expect("timestamp field present");
    let end = start + json[start..].find(',').unwrap();
    format!("{}{}", &json[..start], &json[end..])
}

/// Structural float-tolerant comparison of two JSON values.
fn approx_same(a: &serde_json::Value, b: &serde_json::Value) -> bool {
    use serde_json::Value::*;
    match (a, b) {
        (Number(x), Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()))
        }
        (Array(xs), Array(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| approx_same(x, y))
        }
        (Object(xs), Object(ys)) => {
            xs.len() == ys.len()
                && xs
                    .iter()
                    .all(|(k, x)| ys.get(k).is_some_and(|y| approx_same(x, y)))
        }
        _ => a == b,
    }
}

#[test]
fn rip_suff_cli_reports_inv_sqrt2() {
    let out = bin()
        .args(["rip-suff", "--n", "4", "--k", "1", "--weights", "ones"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("\"delta\":0.707106781186548"),
        "stdout: {stdout}"
    );
}

#[test]
fn measure3d_cli_reports_areas_and_compliance() {
    let out = bin()
        .args(["measure3d", "--weights", "1,1,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    let CommandOutput::Measure3d { results } = &report.results else {
        panic!("wrong output kind");
    };
    let r = &results[0];
    assert!((r.area - 1.3593476378164875).abs() < 1e-12);
    assert!((r.published_formula_area - 1.000515344058482).abs() < 1e-12);
    assert!((r.nu - 0.8918265520306072).abs() < 1e-12);
    assert!((r.u - 0.35095931218364373).abs() < 1e-12);
    assert!((r.published_deviation - 0.3588322937580055).abs() < 1e-12);
}

#[test]
fn certify_cli_finds_no_violations_for_ones() {
    let out = bin()
        .args([
            "certify", "--measure", "rip-nec", "--n", "4", "--k", "1", "--trials", "200",
            "--seed", "7", "--restarts", "6", "--max-iters", "150",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    let CommandOutput::Certify { report } = &report.results else {
        panic!("wrong output kind");
    };
    assert_eq!(report.trials, 200);
    assert!(report.violations.is_empty());
    assert!(report.min_margin > 0.0);
}

#[test]
fn exit_codes_follow_error_classes() {
    // 0: success
    let ok = bin().args(["curves", "--k", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    // 2: config error (missing n)
    let cfg = bin().args(["mc", "--k", "1"]).output().unwrap();
    assert_eq!(cfg.status.code(), Some(2));
    // 2: config error (invalid weights entry)
    let bad_w = bin()
        .args(["measure3d", "--weights", "1,abc,1"])
        .output()
        .unwrap();
    assert_eq!(bad_w.status.code(), Some(2));
    // 3: write failure surfaces as a runtime error
    let io = bin()
        .args([
            "curves", "--k", "1",
            "--output", "/nonexistent-regcomply-dir/report.json",
        ])
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(3));
    // 4: budget guard (brute force beyond the supported instance size)
    let guard = bin()
        .args(["oracle", "--n", "7", "--k", "1", "--weights", "ones"])
        .output()
        .unwrap();
    assert_eq!(guard.status.code(), Some(4));
}

#[test]
fn config_file_drives_a_run_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        br#"{"command":"rip-suff","n":2,"k":1,"weights":"ones","seed":3}"#,
    )
    .unwrap();

    let from_file = bin()
        .args(["--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(from_file.status.success());
    let report: RunReport = serde_json::from_slice(&from_file.stdout).unwrap();
    assert_eq!(report.config.n, Some(2));

    let overridden = bin()
        .args(["--config", path.to_str().unwrap(), "rip-suff", "--n", "6", "--k", "2"])
        .output()
        .unwrap();
    assert!(overridden.status.success());
    let report: RunReport = serde_json::from_slice(&overridden.stdout).unwrap();
    assert_eq!(report.config.n, Some(6));
    assert_eq!(report.config.k, Some(2));
    assert_eq!(report.config.seed, Some(3), "file value survives");
}

#[test]
fn emitted_json_reparses_into_an_equivalent_report() {
    let mut cfg = RunConfig::new(CommandKind::RipNec);
    cfg.n = Some(4);
    cfg.k = Some(1);
    cfg.weights = Some(WeightsSpec::List(vec![1.0, 0.75, 0.5, 0.875]));
    cfg.seed = Some(11);
    let report = run(&cfg).unwrap();
    let bytes = to_json_bytes(&report).unwrap();
    let reparsed: RunReport = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(reparsed.config, cfg);
    let a: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let b: serde_json::Value =
        serde_json::from_slice(&to_json_bytes(&reparsed).unwrap()).unwrap();
    assert!(approx_same(&a, &b), "report drifted through a round-trip");
}

#[test]
fn identical_configs_give_byte_identical_json_apart_from_timestamp() {
    let mut cfg = RunConfig::new(CommandKind::Mc);
    cfg.n = Some(4);
    cfg.k = Some(2);
    cfg.weights = Some(WeightsSpec::Text("random:2:5".into()));
    cfg.samples = Some(20_000);
    cfg.seed = Some(9);
    let a = to_json_bytes(&run(&cfg).unwrap()).unwrap();
    let b = to_json_bytes(&run(&cfg).unwrap()).unwrap();
    assert_eq!(
        strip_timestamp(std::str::from_utf8(&a).unwrap()),
        strip_timestamp(std::str::from_utf8(&b).unwrap())
    );
}

#[test]
fn worker_cap_env_var_does_not_change_results() {
    let run_with_threads = |threads: &str| -> String {
        let out = bin()
            .env("REGCOMPLY_THREADS", threads)
            .args([
                "mc", "--n", "4", "--k", "1", "--weights", "ones", "--samples", "50000",
                "--seed", "21", "--mode", "nu",
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        strip_timestamp(&String::from_utf8(out.stdout).unwrap())
    };
    let one = run_with_threads("1");
    let two = run_with_threads("2");
    let eight = run_with_threads("8");
    assert_eq!(one, two);
    assert_eq!(one, eight);
}

#[test]
fn csv_projection_is_plottable() {
    let out = bin()
        .args(["curves", "--k", "2", "--l-max", "6", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "l,b_l,d_l");
    assert_eq!(lines.len(), 7);
    // L = 2, k = 2 row carries f(1) = 0.2 and min(1, 1) = 1
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row[0], "2");
    assert!((row[1].parse::<f64>().unwrap() - 0.2).abs() < 1e-14);
    assert!((row[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn output_files_are_written_atomically_in_place() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bin()
        .args([
            "rip-suff", "--n", "2", "--k", "1", "--weights", "ones",
            "--output", path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let bytes = std::fs::read(&path).unwrap();
    let report: RunReport = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(report.config.output.as_deref(), path.to_str());
    // no stray temp files
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path() != path)
        .collect();
    assert!(leftovers.is_empty());
}
