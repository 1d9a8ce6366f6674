//! End-to-end tests of the binary: exit codes, flag/config precedence, CSV
//! and SVG emission, and thread-count determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncq-thermo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn levels_prints_spectrum_table() {
    let out = run(&[
        "levels",
        "--omega",
        "1",
        "--gamma",
        "0.1",
        "--max-level",
        "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("A = 1.05, B = 0.05"));
    // header + 4 rows + comment line
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn partition_reports_certified_sum_and_closed_form() {
    let out = run(&["partition", "--omega", "1", "--gamma", "0.1", "--beta", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Z           = 1.4690647748989953e0"));
    assert!(text.contains("closed form"));
}

#[test]
fn thermo_on_geometric_point() {
    let out = run(&[
        "thermo",
        "--omega",
        "1",
        "--gamma",
        "0",
        "--beta",
        "0.6931471805599453",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("internal energy = 1.0000000000000000e0"),
        "{text}"
    );
}

#[test]
fn temperature_and_beta_flags_conflict() {
    let out = run(&[
        "thermo",
        "--omega",
        "1",
        "--gamma",
        "0",
        "--beta",
        "1",
        "--temperature",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cycle_uses_documented_defaults() {
    let out = run(&["cycle", "stirling-engine"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("A: (20, 2, 0)"), "{text}");
    assert!(
        text.contains("efficiency   = 2.9048709408056206e-1"),
        "{text}"
    );
}

#[test]
fn reversed_bath_order_is_a_validation_error() {
    let out = run(&["cycle", "stirling-engine", "--t-hot", "5", "--t-cold", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("t_hot"));
}

#[test]
fn degenerate_fridge_is_a_computation_error() {
    let out = run(&[
        "cycle",
        "stirling-fridge",
        "--t-hot",
        "10",
        "--t-cold",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("degenerate"));
}

#[test]
fn unknown_cycle_name_is_rejected() {
    let out = run(&["cycle", "carnot"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn perturbative_warning_past_gamma_half() {
    let out = run(&["cycle", "stirling-engine", "--gamma", "0.7"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("perturbative"));
}

#[test]
fn sweep_to_stdout_is_csv() {
    let out = run(&[
        "sweep",
        "--cycle",
        "stirling-fridge",
        "--start",
        "0.05",
        "--stop",
        "0.4",
        "--steps",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("swept_value,merit_nho,merit_ho,W_total,Q1,Q2,Q3,Q4,status"));
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().skip(1).all(|l| l.ends_with("OK")));
}

#[test]
fn sweep_rejects_bad_grid_with_exit_2() {
    let out = run(&[
        "sweep",
        "--cycle",
        "stirling-fridge",
        "--start",
        "0.4",
        "--stop",
        "0.1",
        "--steps",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "sweep",
        "--cycle",
        "stirling-fridge",
        "--param",
        "t-cold",
        "--start",
        "5",
        "--stop",
        "20",
        "--steps",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("grid point"));
}

#[test]
fn sweep_writes_files_and_is_thread_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let csv_1 = dir.path().join("one.csv");
    let csv_4 = dir.path().join("four.csv");
    let svg = dir.path().join("plot.svg");

    let base_args = |csv: &Path| {
        vec![
            "sweep".to_string(),
            "--cycle".into(),
            "stirling-engine".into(),
            "--start".into(),
            "0".into(),
            "--stop".into(),
            "0.4".into(),
            "--steps".into(),
            "9".into(),
            "--csv".into(),
            csv.display().to_string(),
        ]
    };

    let out = bin()
        .args(base_args(&csv_1))
        .arg("--svg")
        .arg(&svg)
        .env("NCQ_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let out = bin()
        .args(base_args(&csv_4))
        .env("NCQ_THREADS", "4")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let bytes_1 = std::fs::read(&csv_1).unwrap();
    let bytes_4 = std::fs::read(&csv_4).unwrap();
    assert_eq!(bytes_1, bytes_4, "thread count changed the CSV bytes");

    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    assert!(svg_text.contains("HO baseline"));
}

#[test]
fn sweep_without_baseline_leaves_column_empty() {
    let out = run(&[
        "sweep",
        "--cycle",
        "stirling-fridge",
        "--start",
        "0.1",
        "--stop",
        "0.3",
        "--steps",
        "3",
        "--no-ho-baseline",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let merit_ho = line.split(',').nth(2).unwrap();
        assert!(merit_ho.is_empty());
    }
}

#[test]
fn bogus_thread_env_is_a_validation_error() {
    let out = bin()
        .args([
            "sweep",
            "--cycle",
            "otto-fridge",
            "--start",
            "0",
            "--stop",
            "0.2",
            "--steps",
            "3",
        ])
        .env("NCQ_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NCQ_THREADS"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("point.conf");
    std::fs::write(
        &cfg,
        "# operating point\nt-hot = 30\ngamma = 0.2\nscaling-mode = fixed-gamma\n",
    )
    .unwrap();

    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "cycle",
            "stirling-engine",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("A: (30, 2, 0.2)"), "{text}");
    assert!(text.contains("scaling: fixed-gamma"), "{text}");

    // explicit flag beats the file
    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "cycle",
            "stirling-engine",
            "--t-hot",
            "25",
        ])
        .output()
        .unwrap();
    assert!(stdout(&out).contains("A: (25, 2, 0.2)"));
}

#[test]
fn config_with_unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "thot = 30\n").unwrap();
    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "cycle",
            "stirling-engine",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key"));
}

#[test]
fn validate_passes_and_exits_zero() {
    let out = run(&["validate"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("result: 12/12 passed"), "{text}");
    assert!(!text.contains("FAIL"));
}
