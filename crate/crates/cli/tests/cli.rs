use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qse(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qse")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn simulate_preset_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qse(&["simulate", "--preset", "fig3a", "--out", "run", "--dt", "0.05", "--tmax", "10"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("bound_state_B = absent"));
    let manifest = fs::read_to_string(tmp.path().join("run/manifest.txt")).unwrap();
    assert!(manifest.contains("status = complete"));
    assert!(manifest.contains("t_max = 1.0000000000e1"));
    assert!(tmp.path().join("run/ellipsoid_B_10.csv").is_file());
}

#[test]
fn simulate_from_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("run.cfg"),
        "# weak coupling on Bob's side\npreset = fig1\neta_B = 0.02\ntheta = pi/6\nt_max = 5\ndt = 0.05\nout_dir = custom\ncloud_points = 0\n",
    )
    .unwrap();
    let out = qse(&["simulate", "--config", "run.cfg"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = fs::read_to_string(tmp.path().join("custom/manifest.txt")).unwrap();
    assert!(manifest.contains("eta_B = 2.0000000000e-2"));
    assert!(manifest.contains("bound_state_B = absent"));
}

#[test]
fn bad_inputs_fail_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.cfg"), "preset = fig1\np = 2\n").unwrap();
    let out = qse(&["simulate", "--config", "bad.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`p`"));
    assert_eq!(qse(&["simulate", "--preset", "fig7"], tmp.path()).status.code(), Some(2));
    assert!(!qse(&["simulate"], tmp.path()).status.success());
    let out = qse(&["sweep", "--preset", "fig1", "--param", "s", "--grid", "1:2:1", "--out", "x"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "sweep", "--preset", "fig4", "--param", "eta_B", "--grid", "0.04:0.06:0.02", "--out", "sw", "--dt", "0.05", "--tmax", "2",
        "--workers", "2",
    ];
    let out = qse(&args, tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(tmp.path().join("sw/summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("eta_B,4.0000000000e-2,complete,"));
    assert!(tmp.path().join("sw/eta_B_1/manifest.txt").is_file());

    let empty = qse(&["sweep", "--preset", "fig1", "--param", "p", "--grid", "1:0:0.1", "--out", "none"], tmp.path());
    assert!(empty.status.success());
    assert_eq!(fs::read_to_string(tmp.path().join("none/summary.csv")).unwrap().lines().count(), 1);
}

#[test]
fn spectrum_flips_above_critical_coupling() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qse(&["spectrum", "--s", "1", "--omegac", "20", "--eta-grid", "0.04:0.06:0.005"], tmp.path());
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("spectrum.csv")).unwrap();
    let present: Vec<bool> = text.lines().skip(1).map(|l| !l.ends_with(",,")).collect();
    assert_eq!(present, [false, false, false, true, true]);
}
