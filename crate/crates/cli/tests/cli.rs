use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_warpzeta"));
    c.env_remove("WARPZETA_THREADS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_json(out: &Output) -> serde_json::Value {
    assert_eq!(out.status.code(), Some(2));
    serde_json::from_slice(out.stderr.trim_ascii()).expect("stderr is JSON")
}

#[test]
fn dump_tables_text_matches_golden_files() {
    let out = run(&["dump-tables", "--imax", "3", "--format", "csv"]);
    assert!(out.status.success());
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    let f = std::fs::read_to_string(golden_dir.join("f_table_i3.txt")).unwrap();
    let om = std::fs::read_to_string(golden_dir.join("omega_table_i3.txt")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), format!("{f}\n{om}"));
}

#[test]
fn dump_tables_json_lists_every_entry() {
    let v = stdout_json(&run(&["dump-tables", "--imax", "2"]));
    assert_eq!(v["F"].as_array().unwrap().len(), 1 + 2 + 3 + 4 - 1);
    assert!(v["F"][1].as_str().unwrap().starts_with("F[1,0] ="));
}

#[test]
fn logdet_on_cylinder_config() {
    let cfg = configs().join("cylinder.json");
    let v = stdout_json(&run(&["logdet", "--config", cfg.to_str().unwrap()]));
    let zp = v["zeta0_prime"].as_f64().unwrap();
    assert!((zp - 1.6449337).abs() < 1e-5, "{zp}");
    assert_eq!(v["logdet"].as_f64().unwrap(), -zp);
    assert_eq!(v["nu_cutoff"].as_f64().unwrap(), 500.0);
    let names: Vec<_> = v["breakdown"].as_array().unwrap().iter().map(|t| t["term"].as_str().unwrap()).collect();
    assert_eq!(names, ["Zprime0", "A'_-1", "A'_0", "A'_1", "zero_mode"]);
    assert!(v["tolerances"]["ode_rtol"].is_number());
}

#[test]
fn reports_are_bit_identical_across_thread_counts() {
    let cfg = configs().join("sin.json");
    let cfg = cfg.to_str().unwrap();
    let one = run(&["logdet", "--config", cfg, "--threads", "1"]);
    let four = bin()
        .args(["logdet", "--config", cfg])
        .env("WARPZETA_THREADS", "4")
        .output()
        .unwrap();
    let again = run(&["logdet", "--config", cfg]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn zeta0_splits_into_parts() {
    let v = stdout_json(&run(&["zeta0"]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-10);
    assert!((v["nonzero_mode_part"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["zero_mode_part"].as_f64().unwrap(), -0.5);
    let n = stdout_json(&run(&["zeta0", "--bc", "neumann"]));
    assert_eq!(n["kernel_dimension"].as_u64().unwrap(), 1);
}

#[test]
fn heat_coeffs_csv_has_requested_rows() {
    let out = run(&["heat-coeffs", "--n-max", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "n,total,interior_part,boundary_part,zero_mode_part,error");
    assert_eq!(lines.len(), 5);
    let a0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((a0 - 0.5).abs() < 1e-12);
}

#[test]
fn eigenvalues_are_certified() {
    let v = stdout_json(&run(&["eigenvalues", "--nu", "3", "--count", "4"]));
    assert_eq!(v["certified"], serde_json::Value::Bool(true));
    let first = v["eigenvalues"][0]["value"].as_f64().unwrap();
    let want = std::f64::consts::PI.powi(2) + 9.0;
    assert!((first / want - 1.0).abs() < 1e-9);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let out = run(&["heat-coeffs", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("n,total"));
}

#[test]
fn invalid_config_reports_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"interval": {"a": 0, "b": 1}, "warp": {"kind": "constant", "value": -1}}"#).unwrap();
    let e = error_json(&run(&["zeta0", "--config", path.to_str().unwrap()]));
    assert_eq!(e["error"]["kind"], "NonpositiveWarp");

    std::fs::write(&path, r#"{"interval": {"a": 0, "b": 1}, "warp": {"kind": "constant", "value": 1}, "mass": 1}"#).unwrap();
    let e = error_json(&run(&["logdet", "--config", path.to_str().unwrap()]));
    assert!(e["error"]["message"].as_str().unwrap().contains("massless"));

    let e = error_json(&run(&["logdet", "--config", "/nonexistent/cfg.json"]));
    assert_eq!(e["error"]["kind"], "Io");

    let e = error_json(&run(&["logdet", "--tol", "0.5"]));
    assert_eq!(e["error"]["kind"], "InvalidConfig");
}

#[test]
fn unknown_subcommand_is_an_error() {
    let e = error_json(&run(&["frobnicate"]));
    assert_eq!(e["error"]["kind"], "InvalidConfig");
}

#[test]
fn file_base_with_missing_zeta_points_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spectrum.csv"), "nu,multiplicity\n1,2\n2,2\n").unwrap();
    std::fs::write(
        dir.path().join("zeta.json"),
        r#"{"d": 1, "zero_mode_degeneracy": 1, "points": [], "zeta0": -1, "zeta0_prime": 0, "heat_coeffs": [1.77, -1]}"#,
    )
    .unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"interval": {"a": 0, "b": 1}, "warp": {"kind": "constant", "value": 1},
            "base": {"kind": "file", "spectrum_path": "spectrum.csv", "zeta_path": "zeta.json"}}"#,
    )
    .unwrap();
    let e = error_json(&run(&["zeta0", "--config", cfg.to_str().unwrap()]));
    assert_eq!(e["error"]["kind"], "MissingZetaData");
}

#[test]
fn validate_cylinder_passes() {
    let v = stdout_json(&run(&["validate", "--preset", "cylinder"]));
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    assert!(v["checks"].as_array().unwrap().len() >= 10);
}
