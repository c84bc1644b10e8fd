use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_toroidq");

fn toroidq(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("RUST_LOG", "off").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

const SMALL_SWEEP: &str = r#"
[params]
kappa_ex = 30.0
kappa_i = 0.5
gamma = 5.2
drive = 10.0

[grid]
start = 0.0
stop = 120.0
count = 7
"#;

#[test]
fn fig2_spectrum_peak() {
    let out = toroidq(&["spectrum", "--figure", "2"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let detunings = column(&csv, "Delta_C_over_2pi_MHz");
    let k = detunings.iter().position(|d| d.parse::<f64>().unwrap() == 0.0).unwrap();
    let t_f: f64 = column(&csv, "T_F")[k].parse().unwrap();
    let t_f0: f64 = column(&csv, "T_F_no_atom")[k].parse().unwrap();
    assert!((t_f - 0.25).abs() < 0.01, "{t_f}");
    assert!(t_f0.abs() < 1e-6);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
}

#[test]
fn reruns_and_worker_counts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_SWEEP);
    let mut files = Vec::new();
    for (name, workers) in [("a.csv", "1"), ("b.csv", "1"), ("c.csv", "4")] {
        let path = dir.path().join(name);
        let out = toroidq(&["sweep-coupling", "--config", &cfg, "--workers", workers, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        files.push(std::fs::read(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
}

#[test]
fn empty_grid_is_a_config_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &SMALL_SWEEP.replace("count = 7", "count = 0"));
    let out_path = dir.path().join("out.csv");
    let out = toroidq(&["sweep-coupling", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.count"));
    assert!(!out_path.exists());
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[params]\nkappa_ex = 30.0\ngama = 5.2\n");
    let out = toroidq(&["spectrum", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gama"));
    assert_eq!(toroidq(&["spectrum"]).status.code(), Some(1));
    assert_eq!(toroidq(&["spectrum", "--figure", "2", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(toroidq(&["--help"]).status.code(), Some(0));
}

#[test]
fn failed_points_are_marked_or_abort_in_strict_mode() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SMALL_SWEEP}\n[run]\nmax_dim = 10\n");
    let cfg = write(dir.path(), "c.toml", &text);
    let out = toroidq(&["sweep-coupling", "--config", &cfg]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let status = column(&csv, "status");
    assert_eq!(status.len(), 7);
    assert!(status.iter().all(|s| s == "failed"));
    assert!(column(&csv, "T_F").iter().all(|v| v == "NaN"));

    let out_path = dir.path().join("strict.csv");
    let out = toroidq(&["sweep-coupling", "--config", &cfg, "--strict", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn table_check_passes_every_entry() {
    let out = toroidq(&["table1-check", "--figure", "3"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{csv}");
}

#[test]
fn json_mirrors_csv() {
    let csv = String::from_utf8(toroidq(&["bistability", "--figure", "6"]).stdout).unwrap();
    let json = String::from_utf8(toroidq(&["bistability", "--figure", "6", "--format", "json"]).stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let y = column(&csv, "Y_abs");
    assert_eq!(rows.len(), y.len());
    assert_eq!(rows[7]["Y_abs"].as_f64().unwrap(), y[7].parse::<f64>().unwrap());
}

#[test]
fn pulse_and_fidelity_presets_run() {
    let pulse = String::from_utf8(toroidq(&["pulse", "--figure", "8"]).stdout).unwrap();
    let forward: Vec<f64> = column(&pulse, "flux_forward_g").iter().map(|v| v.parse().unwrap()).collect();
    let empty: Vec<f64> = column(&pulse, "flux_forward_g0").iter().map(|v| v.parse().unwrap()).collect();
    let peak = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    assert!(peak(&forward) < 0.01 * peak(&empty));

    let fid = String::from_utf8(toroidq(&["fidelity", "--figure", "7"]).stdout).unwrap();
    let exact = column(&fid, "F_exact");
    let approx = column(&fid, "F_approx");
    for (e, a) in exact.iter().zip(&approx) {
        let (e, a): (f64, f64) = (e.parse().unwrap(), a.parse().unwrap());
        assert!((e - a).abs() < 0.02);
    }
}
