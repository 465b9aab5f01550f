use std::path::Path;
use std::process::{Command, Output};

use tavis_bell::approx::approximation_fidelity;
use tavis_bell::config::{RunConfig, SweepConfig};
use tavis_bell::fock::default_cutoff;
use tavis_bell::C64;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tavis-bell")).args(args).output().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn write_config(dir: &Path, config: &RunConfig) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, config.to_json().unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn protocol_rows_sum_to_one() {
    let out = cli(&["protocol"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("branch,detector1,detector2,probability,ideal_probability,fidelity\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4][0], "fail");
    let total: f64 = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.nbar = 20.5;
    config.cutoff = Some(90);
    let path = write_config(dir.path(), &config);
    let out = cli(&["--config", &path, "--dump-config"]);
    assert!(out.status.success());
    let back = RunConfig::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(back, config);
    let defaults = cli(&["--dump-config"]);
    assert_eq!(RunConfig::from_json(std::str::from_utf8(&defaults.stdout).unwrap()).unwrap(), RunConfig::default());
}

#[test]
fn invalid_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"nbar": 0}"#).unwrap();
    let out = cli(&["--config", bad.to_str().unwrap(), "protocol"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nbar"));
    assert!(!cli(&["overlap", "--j", "3"]).status.success());
    assert!(!cli(&["--config", "/nonexistent/config.json", "protocol"]).status.success());
    assert!(!cli(&[]).status.success());
}

#[test]
fn approx_fidelity_matches_library() {
    let out = cli(&["approx-fidelity", "--nbar-list", "10,40", "--tau-steps", "5"]);
    assert!(out.status.success());
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 10);
    let atom = RunConfig::default().atom().unwrap();
    for row in &rows {
        let (tau, f): (f64, f64) = (row[0].parse().unwrap(), row[2].parse().unwrap());
        if tau == 0.0 {
            assert!((f - 1.0).abs() < 1e-10);
        }
    }
    for idx in [1, 2, 7] {
        let row = &rows[idx];
        let (tau, nbar): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        let expected =
            approximation_fidelity(&atom, C64::from_polar(nbar.sqrt(), atom.phi), tau, default_cutoff(nbar)).unwrap();
        assert!((row[2].parse::<f64>().unwrap() - expected).abs() < 1e-10);
    }
}

#[test]
fn overlap_columns() {
    let out = cli(&["overlap", "--nbar", "12.16", "--tau-steps", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("tau,exact_re,exact_im,exact_abs,approx_re,approx_im,approx_abs,approx_valid\n"));
    let rows = csv_rows(&text);
    let half: Vec<f64> = rows[1].iter().map(|v| v.parse().unwrap()).collect();
    assert!((half[3] - 0.733).abs() < 0.02);
    assert!((half[3] - half[6]).abs() < 0.02);
}

#[test]
fn wigner_at_zero_time_is_one_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.nbar = 4.0;
    config.atom.phi = 0.0;
    config.grid = Some(tavis_bell::config::GridConfig { re_min: -1.0, re_max: 5.0, im_min: -3.0, im_max: 3.0, n_re: 31, n_im: 31 });
    config.sweeps = SweepConfig::default();
    let path = write_config(dir.path(), &config);
    let csv = dir.path().join("w.csv");
    let out = cli(&["--config", &path, "wigner", "--tau", "0", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = csv_rows(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(rows.len(), 31 * 31);
    let best = rows
        .iter()
        .map(|r| r.iter().map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .max_by(|a, b| a[2].total_cmp(&b[2]))
        .unwrap();
    assert!((best[0] - 2.0).abs() < 1e-9 && best[1].abs() < 1e-9);
    assert!((best[2] - std::f64::consts::FRAC_2_PI).abs() < 1e-6);
}

#[test]
fn sweeps_have_expected_shape() {
    let out = cli(&["fidelity-vs-tau", "--tau-min", "0.45", "--tau-max", "0.55", "--steps", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("tau,fb_psi_minus,fb_phi_minus,fb_phi_plus,fb_psi_plus,"));
    assert_eq!(csv_rows(&text).len(), 11);
    let out = cli(&["fidelity-vs-nbar", "--nbar-min", "10", "--nbar-max", "12", "--steps", "3"]);
    assert!(out.status.success());
    assert_eq!(csv_rows(&String::from_utf8(out.stdout).unwrap()).len(), 3);
}
