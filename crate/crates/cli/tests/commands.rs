use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn udw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udw")).args(args).env_remove("UDW_GME_WORKERS").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(row: &str, i: usize) -> f64 {
    row.trim().split(',').nth(i).unwrap().parse().unwrap()
}

#[test]
fn response_row_at_rest() {
    let out = udw(&["response", "--a", "0", "--omega", "1", "--sigma", "0.4", "--L", "200", "--lambda", "0.1"]);
    assert!(out.status.success());
    let row = stdout(&out);
    assert_eq!(row.trim().split(',').count(), 5);
    assert_eq!(field(&row, 0), 0.0);
    assert!((field(&row, 3) - 5.57725300817534e-3).abs() < 1e-15);
}

#[test]
fn probability_scales_with_coupling_squared() {
    let p1 = field(&stdout(&udw(&["response", "--a", "0", "--lambda", "0.1"])), 3);
    let p2 = field(&stdout(&udw(&["response", "--a", "0", "--lambda", "0.2"])), 3);
    assert!((p2 / p1 - 4.0).abs() < 1e-14);
}

#[test]
fn invalid_sigma_exits_with_validation_code() {
    let out = udw(&["response", "--sigma", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));
}

#[test]
fn mode_cap_failure_exits_with_convergence_code() {
    let out = udw(&["response", "--a", "0.2", "--mode-sum", "explicit", "--mode-cap", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a = 0.2"));
}

#[test]
fn gme_file_values_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("states.txt");
    fs::write(
        &good,
        "# ghz, product, half\n\
         3; 0.5 0 0 0; 0.5 0 0 0; 0.5 0 0 0 0 0 0 0\n\
         3; 1 0 0 0; 0 0 0 0; 0 0 0 0 0 0 0 0\n\
         3; 0.4 0.1 0 0; 0.4 0.1 0 0; 0.35 0 0.05 0 0 0 0 0\n",
    )
    .unwrap();
    let out = udw(&["gme", good.to_str().unwrap()]);
    assert!(out.status.success());
    let values: Vec<f64> = stdout(&out).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 3);
    assert_eq!(&values[..2], &[1.0, 0.0]);
    assert!((values[2] - 0.5).abs() < 1e-14);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "3; 0.5 0 0 0; 0.5 0 0 0; 0.5 0 0 0 0 0 0 0\n3; 0.9 0 0 0; 0.5 0 0 0; 0 0 0 0 0 0 0 0\n").unwrap();
    let out = udw(&["gme", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn missing_state_file_is_an_io_error() {
    let out = udw(&["gme", "/nonexistent/states.txt"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unwritable_output_fails_before_compute() {
    let out = udw(&["sweep", "--steps", "2", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sweep_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.tsv");
    let out = udw(&[
        "sweep", "--omega", "0.05", "--n-accel", "1", "--a-min", "0", "--a-max", "0.2", "--steps", "4",
        "--format", "tsv", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a\teta0_abs\teta1_abs\tP\tE\tdp_sign\tde_sign\tregime");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| l.ends_with("antiUnruh_E_up")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# detector\nlambda = 0.2\na = 0\n").unwrap();
    let from_cfg = field(&stdout(&udw(&["--config", cfg.to_str().unwrap(), "response"])), 3);
    let flagged = field(&stdout(&udw(&["--config", cfg.to_str().unwrap(), "response", "--lambda", "0.1"])), 3);
    assert!((from_cfg / flagged - 4.0).abs() < 1e-14);

    fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = udw(&["--config", cfg.to_str().unwrap(), "response"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduced_figures_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig");
    let out = udw(&[
        "figures", "--out-dir", out_dir.to_str().unwrap(), "--omegas-small", "0.05", "--omegas-large", "0.4",
        "--steps", "10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 10);
    for name in &names {
        let text = fs::read_to_string(Path::new(&out_dir).join(name)).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), 11, "{name}");
        assert!(rows.iter().all(|r| field(r, 3) >= 0.0));
    }
    let esb = fs::read_to_string(out_dir.join("sigma5_n2_omega0.4.csv")).unwrap();
    assert_eq!(field(esb.lines().nth(1).unwrap(), 4), 0.0);
}
