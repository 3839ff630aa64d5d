//! End-to-end runs of the compiled binary: exit codes, exact CSV bytes,
//! and the determinism contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::tempdir;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinstitch"))
}

fn run_config(dir: &Path, config: &Path, extra: &[&str]) -> Output {
    binary()
        .arg("run")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(dir)
        .args(extra)
        .output()
        .expect("binary launches")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn experiments() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments")
}

#[test]
fn coefficients_row_is_reproduced_byte_for_byte() {
    let dir = tempdir().unwrap();
    let out = run_config(dir.path(), &experiments().join("coefficients.json"), &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("coefficients.csv")).unwrap();
    assert_eq!(
        csv,
        "f0,fZ,Im_fXY,F1,F2,K_gamma,slope\n\
         0.952525689,-1.40904756,0.3889828552,0,0.4083699365,0.6444271933,0.2368482228\n"
    );
    let manifest = fs::read_to_string(dir.path().join("coefficients_manifest.json")).unwrap();
    assert!(manifest.contains("\"task\": \"coefficients\""));
    assert!(manifest.contains("\"version\""));
}

#[test]
fn ultrashort_optimize_row_is_frozen() {
    let dir = tempdir().unwrap();
    let out = run_config(dir.path(), &experiments().join("optimize_ultrashort.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("optimize.csv")).unwrap();
    assert_eq!(
        csv,
        "T,a1_opt,a2_opt,R_opt,R_linear,constraint_ok,iterations\n\
         0.005,-0.8969736067,646.8406962,0.04635987818,0.04747358152,true,15\n"
    );
}

#[test]
fn repeat_runs_and_thread_counts_give_identical_bytes() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "small_landscape.json",
        r#"{
            "chain": { "n_spins": 6, "field": 0.9 },
            "task": "landscape",
            "horizon": 0.2,
            "a1_range": [-30.0, 30.0],
            "a2_range": [-10.0, 20.0],
            "resolution": [7, 5]
        }"#,
    );
    let mut outputs = Vec::new();
    for extra in [&[][..], &[][..], &["--jobs", "2"][..]] {
        let out = run_config(dir.path(), &config, extra);
        assert_eq!(out.status.code(), Some(0));
        outputs.push(fs::read(dir.path().join("landscape.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "same config, different bytes");
    assert_eq!(outputs[0], outputs[2], "--jobs 2 changed the bytes");
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("a1,a2,fidelity\n"));
    assert_eq!(text.lines().count(), 36, "7 x 5 grid plus header");
}

#[test]
fn missing_horizon_exits_two_and_writes_nothing() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "missing_horizon.json",
        r#"{
            "chain": { "n_spins": 6, "field": 0.9 },
            "task": "evolve",
            "amplitudes": [0.0, 0.0]
        }"#,
    );
    let sink = dir.path().join("results");
    let out = run_config(&sink, &config, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));
    // The output directory is untouched: not even created.
    assert!(!sink.exists());
}

#[test]
fn unknown_config_fields_exit_two() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "unknown_field.json",
        r#"{
            "chain": { "n_spins": 6, "field": 0.9 },
            "task": "coefficients",
            "walltime": 60
        }"#,
    );
    let out = run_config(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("walltime"));
}

#[test]
fn unparseable_json_exits_two() {
    let dir = tempdir().unwrap();
    let config = write_config(dir.path(), "broken.json", "{ this is not json");
    let out = run_config(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_zero_field_chain_exits_three() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "zero_field.json",
        r#"{
            "chain": { "n_spins": 6, "field": 0.0, "degeneracy_offset": 1e-6 },
            "task": "coefficients"
        }"#,
    );
    let out = run_config(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn unsettled_refinement_keeps_results_and_exits_three() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "coarse_evolve.json",
        r#"{
            "chain": { "n_spins": 6, "field": 0.9 },
            "task": "evolve",
            "horizon": 1.0,
            "amplitudes": [0.0, 0.0],
            "steps": 100
        }"#,
    );
    let out = run_config(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(3));
    let csv = fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    assert!(csv.starts_with("T,steps,fidelity,infidelity,ratio,status\n"));
    assert!(csv.trim_end().ends_with("FAILED"), "csv: {csv}");
    assert!(dir.path().join("evolve_manifest.json").exists());
}

#[test]
fn settled_refinement_exits_clean() {
    let dir = tempdir().unwrap();
    let out = run_config(dir.path(), &experiments().join("evolve_ramp.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    assert!(csv.trim_end().ends_with("OK"), "csv: {csv}");
    assert!(csv.contains("1,1000,0.9717159684,"));
}

#[test]
fn sweep_writes_both_tables_and_a_plot_script() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "single_sweep.json",
        r#"{
            "chain": { "n_spins": 6, "field": 0.9 },
            "task": "sweep",
            "horizons": [0.05],
            "seed_strategy": "analytic"
        }"#,
    );
    let out = run_config(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(0));
    let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("T,a1_opt,a2_opt,R_opt,R_linear,constraint_ok,iterations\n"));
    assert!(sweep.contains("0.05,-0.872278"), "sweep: {sweep}");
    let table1 = fs::read_to_string(dir.path().join("sweep_table1.csv")).unwrap();
    assert_eq!(
        table1,
        "T,a2_opt,gamma,gamma_over_T\n0.05,65.23557322,0.03216029708,0.6432059416\n"
    );
    let script = fs::read_to_string(dir.path().join("sweep.gp")).unwrap();
    assert!(script.contains("sweep.csv"));
}

#[test]
fn gap_sweep_endpoints_are_frozen() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "tiny_gap.json",
        r#"{
            "chain": { "n_spins": 6, "field": 0.9 },
            "task": "gap-sweep",
            "grid_points": 2
        }"#,
    );
    let out = run_config(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("gap_sweep.csv")).unwrap();
    assert_eq!(csv, "g,gap\n0,0.3405073586\n1,0.1636198914\n");
}

#[test]
fn spectrum_lists_every_level_in_order() {
    let dir = tempdir().unwrap();
    let out = run_config(dir.path(), &experiments().join("spectrum.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("g,index,eigenvalue"));
    assert_eq!(lines.next(), Some("1,0,-7.363913821"));
    assert_eq!(csv.lines().count(), 65, "header plus 64 levels");
    let eigenvalues: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|line| line.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(eigenvalues.windows(2).all(|w| w[0] <= w[1]), "levels must ascend");
}

#[test]
fn zero_jobs_is_refused() {
    let dir = tempdir().unwrap();
    let out = run_config(dir.path(), &experiments().join("coefficients.json"), &["--jobs", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_output_stem_is_honored() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "named.json",
        r#"{
            "chain": { "n_spins": 6, "field": 0.9 },
            "task": "coefficients",
            "output": "endpoint_overlaps"
        }"#,
    );
    let out = run_config(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("endpoint_overlaps.csv").exists());
    assert!(dir.path().join("endpoint_overlaps_manifest.json").exists());
}
