use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hvdcsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hvdcsim")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn metrics(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("metrics.json")).unwrap();
    serde_json::from_str::<serde_json::Value>(&text).unwrap()["metrics"].clone()
}

#[test]
fn run_writes_outputs_with_exact_header() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    let o = hvdcsim(&["run", "--control", "holistic", "--scenario", "fcr", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("holistic fcr: max discrepancy"), "{stdout}");
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,f_sys,f_off_mmc,f_vsg,U_dc_on,U_dc_off,U_hat_dc_on,I_dc,W_on,W_off,P_ac_on,P_ac_off,P_owpp,P_m,U_sum0_on,U_sum0_off"
    );
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(first.len(), 16);
    assert_eq!(first[0], 0.0);
    assert_eq!(first[1], 1.0);
    assert!(out.join("effective_config.toml").exists());
    let m = metrics(&out);
    assert!(m["steady_state_sync_error_pct"].as_f64().unwrap() < 0.5);
}

#[test]
fn repeat_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = hvdcsim(&["run", "--control", "energy_balancing", "--scenario", "inertia", "--out", d.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["trajectory.csv", "metrics.json", "effective_config.toml"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn effective_config_reproduces_run() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[line]\nr_dc = 0.02\n\n[scenario]\nservice = \"inertia\"\nt_end = 20.0\n");
    let a = tmp.path().join("a");
    let o = hvdcsim(&["run", "--config", &cfg, "--control", "holistic", "--out", a.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b = tmp.path().join("b");
    let eff = a.join("effective_config.toml");
    let o = hvdcsim(&["run", "--config", eff.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["trajectory.csv", "metrics.json", "effective_config.toml"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn zero_disturbance_reports_zero_metrics() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[scenario]\ndp_dstb = 0.0\n");
    let out = tmp.path().join("out");
    let o = hvdcsim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = metrics(&out);
    for k in [
        "max_freq_discrepancy_pct",
        "steady_state_sync_error_pct",
        "power_tracking_error_pct",
        "max_rocof",
        "oscillation_envelope",
    ] {
        assert_eq!(m[k].as_f64().unwrap(), 0.0, "{k}");
    }
    assert_eq!(m["frequency_nadir"].as_f64().unwrap(), 1.0);
}

#[test]
fn negative_inertia_is_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[grid]\nh_sys = -1.0\n");
    let o = hvdcsim(&["run", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid.h_sys"), "{}", stderr(&o));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn unknown_key_is_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[line]\nr_dcc = 0.01\n");
    let o = hvdcsim(&["run", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r_dcc"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_is_io_error() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.toml");
    let o = hvdcsim(&["run", "--config", missing.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn unwritable_output_is_io_error() {
    let tmp = TempDir::new().unwrap();
    let file = tmp.path().join("file");
    std::fs::write(&file, "x").unwrap();
    let o = hvdcsim(&["run", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn simulation_abort_exit_code() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[owpp]\nh_floor = 1e-4\n");
    let o = hvdcsim(&["run", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("df_vsg"), "{}", stderr(&o));
}

#[test]
fn steady_state_matches_oracle_and_reports_singularity() {
    let o = hvdcsim(&["steady-state", "--df-on", "-0.004"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let diffs: Vec<f64> = text
        .lines()
        .filter_map(|l| l.split("difference = ").nth(1))
        .map(|v| v.trim().parse().unwrap())
        .collect();
    assert_eq!(diffs.len(), 2, "{text}");
    assert!(diffs.iter().all(|d| d.abs() < 1e-10), "{text}");

    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[line]\nr_dc = 0.0\n");
    let o = hvdcsim(&["steady-state", "--config", &cfg, "--df-on", "-0.004"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("closed form singular at R_dc = 0"), "{}", stderr(&o));
}

#[test]
fn sweep_argument_errors() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("s");
    let o = hvdcsim(&["sweep", "--param", "X_eq", "--values", "1,2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = hvdcsim(&["sweep", "--param", "R_dc", "--values", "", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = hvdcsim(&["sweep", "--param", "R_dc", "--values", "1:0:0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_hvdcsim"))
        .args(["sweep", "--param", "R_dc", "--values", "0.01", "--out", out.to_str().unwrap()])
        .env("HVDCSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("HVDCSIM_THREADS"));
}

#[test]
fn p4_sweep_rescales_sync_ratio() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("s");
    let o = Command::new(env!("CARGO_BIN_EXE_hvdcsim"))
        .args(["sweep", "--control", "holistic", "--scenario", "fcr", "--param", "P_4"])
        .args(["--values", "0.165,0.33,0.66", "--out", out.to_str().unwrap()])
        .env("HVDCSIM_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("P_4,max_freq_discrepancy_pct,"));
    let ratios: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    for (r, want) in ratios.iter().zip([2.0, 1.0, 0.5]) {
        assert!((r / want - 1.0).abs() < 0.02, "{ratios:?}");
    }
}

#[test]
fn compare_writes_matrix() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("c");
    let o = hvdcsim(&["compare", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for mode in ["energy_balancing", "holistic"] {
        for service in ["fcr", "inertia"] {
            assert!(out.join(format!("trajectory_{mode}_{service}.csv")).exists());
            assert!(out.join(format!("metrics_{mode}_{service}.json")).exists());
        }
    }
    let c: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("comparison.json")).unwrap()).unwrap();
    assert_eq!(c["runs"].as_object().unwrap().len(), 4);
    assert_eq!(c["orderings"].as_array().unwrap().len(), 6);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("ordering ")).count(), 6, "{text}");
}
