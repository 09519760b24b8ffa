//! End-to-end runs: files, manifests, determinism and sweeps.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use steering_ellipsoids::runner::output::{ELLIPSOID_HEADER, SUMMARY_HEADER, TIMESERIES_HEADER};
use steering_ellipsoids::runner::*;

fn short(preset: Preset, dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::preset(preset);
    cfg.t_max = 20.0;
    cfg.dt = 0.05;
    cfg.povm_samples = 500;
    cfg.cloud_points = 64;
    cfg.out_dir = dir.to_path_buf();
    cfg
}

fn csv_files(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect()
}

#[test]
fn manifest_lists_exactly_the_files_written() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run_scenario(&short(Preset::Fig1, tmp.path())).unwrap();
    assert!(m.is_complete(), "{:?}", m.status);
    let listed: BTreeSet<String> = m.get("files").unwrap().split(',').map(String::from).collect();
    assert_eq!(listed, csv_files(tmp.path()));
    assert_eq!(listed.len(), 4 + 2 * 3);
    for name in &listed {
        assert!(tmp.path().join(name).is_file());
    }
    let text = fs::read_to_string(tmp.path().join("manifest.txt")).unwrap();
    for key in [
        "schema_version = 1",
        "status = complete",
        "bound_state_A = present",
        "residue_Z_B = ",
        "max_containment_excess = ",
        "wall_time_s = ",
    ] {
        assert!(text.contains(key), "missing {key}");
    }
    for line in text.lines() {
        assert!(line.contains(" = "), "{line}");
    }
}

#[test]
fn csv_schemas() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short(Preset::Fig3a, tmp.path());
    run_scenario(&cfg).unwrap();
    let ts = fs::read_to_string(tmp.path().join("timeseries.csv")).unwrap();
    let mut lines = ts.lines();
    assert_eq!(lines.next(), Some(TIMESERIES_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 400 / cfg.stride + 1);
    assert!(rows.iter().all(|r| r.split(',').count() == 19));
    assert!(rows.last().unwrap().starts_with("2.0000000000e1,"));

    let ell = fs::read_to_string(tmp.path().join("ellipsoid_A_20.csv")).unwrap();
    let lines: Vec<&str> = ell.lines().collect();
    assert_eq!(lines[0], ELLIPSOID_HEADER);
    assert_eq!(lines[1].split(',').count(), 16);
    assert_eq!(lines[2], "x,y,z");
    assert_eq!(lines.len(), 3 + cfg.cloud_points);

    let spectrum = fs::read_to_string(tmp.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = spectrum.lines().collect();
    assert_eq!(lines[0], "eta,bound_energy,residue_Z");
    assert!(lines[2].ends_with(",,"), "Bob has no bound state: {}", lines[2]);

    let traj = fs::read_to_string(tmp.path().join("trajectory_B.csv")).unwrap();
    assert_eq!(traj.lines().next(), Some("t,re_c,im_c,abs_c"));
    assert_eq!(traj.lines().count(), 402);
}

#[test]
fn runs_are_byte_identical() {
    let (one, two) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_scenario(&short(Preset::Fig2b, one.path())).unwrap();
    run_scenario(&short(Preset::Fig2b, two.path())).unwrap();
    let files = csv_files(one.path());
    assert_eq!(files, csv_files(two.path()));
    for name in files {
        let a = fs::read(one.path().join(&name)).unwrap();
        let b = fs::read(two.path().join(&name)).unwrap();
        assert!(a == b, "{name} differs");
    }
}

#[test]
fn failed_run_records_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = short(Preset::Fig1, tmp.path());
    cfg.eta_b = -0.1;
    let m = run_scenario(&cfg).unwrap();
    assert!(matches!(m.status, RunStatus::Failed { stage: Stage::Config, .. }));
    assert_eq!(m.get("status"), Some("failed"));
    assert_eq!(m.get("failed_stage"), Some("config"));
    assert_eq!(m.get("files"), Some(""));
    assert!(csv_files(tmp.path()).is_empty());
    assert!(tmp.path().join("manifest.txt").is_file());
}

#[test]
fn preset_runs_report_bound_states() {
    let tmp = tempfile::tempdir().unwrap();
    for (preset, a, b) in [
        (Preset::Fig1, "present", "present"),
        (Preset::Fig3a, "present", "absent"),
        (Preset::Fig3b, "absent", "present"),
        (Preset::Fig4, "absent", "absent"),
    ] {
        let m = run_scenario(&short(preset, &tmp.path().join(preset.name()))).unwrap();
        assert_eq!(m.get("bound_state_A"), Some(a), "{}", preset.name());
        assert_eq!(m.get("bound_state_B"), Some(b), "{}", preset.name());
    }
}

#[test]
fn long_preset_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |preset: Preset| {
        let mut cfg = RunConfig::preset(preset);
        cfg.dt = 0.02;
        cfg.povm_samples = 1000;
        cfg.cloud_points = 16;
        cfg.out_dir = tmp.path().join(preset.name());
        let m = run_scenario(&cfg).unwrap();
        assert!(m.is_complete());
        m.report.unwrap()
    };
    let fig1 = run(Preset::Fig1);
    assert!(fig1.final_ellipsoid_a.semiaxes.min() > 0.05);
    assert!(fig1.final_ellipsoid_b.semiaxes.min() > 0.05);
    let fig3a = run(Preset::Fig3a);
    assert!(fig3a.final_ellipsoid_b.semiaxes.max() <= 1e-3);
    assert!(fig3a.final_ellipsoid_a.semiaxes.min() > 0.05);
    let fig4 = run(Preset::Fig4);
    assert!(fig4.final_ellipsoid_a.semiaxes.max() <= 1e-3);
    assert!(fig4.final_ellipsoid_b.semiaxes.max() <= 1e-3);
    for r in [&fig1, &fig3a, &fig4] {
        assert_eq!(r.invalid_samples, 0);
        assert_eq!(r.steering_without_entanglement, 0);
        assert!(r.max_containment_excess <= 1e-6);
    }
}

#[test]
fn coupling_sweep_flips_bound_state() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = short(Preset::Fig1, tmp.path());
    cfg.t_max = 2.0;
    cfg.snapshot_times = Some(vec![2.0]);
    let points = sweep(&cfg, "eta_A", &parse_grid("0.03:0.08:0.01").unwrap()).unwrap();
    let present: Vec<bool> = points
        .iter()
        .map(|p| p.outcome.as_ref().unwrap().bound_states.unwrap().0.is_some())
        .collect();
    assert_eq!(present, [false, false, false, true, true, true]);
    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some(SUMMARY_HEADER));
    assert_eq!(summary.lines().count(), 7);
    for p in &points {
        assert!(p.run_dir.join("manifest.txt").is_file());
    }
}

#[test]
fn empty_sweep_writes_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short(Preset::Fig1, tmp.path());
    let points = sweep(&cfg, "p", &[]).unwrap();
    assert!(points.is_empty());
    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    assert_eq!(summary, format!("{SUMMARY_HEADER}\n"));
}

#[test]
fn sweep_keeps_going_past_bad_points() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = short(Preset::Fig1, tmp.path());
    cfg.t_max = 1.0;
    cfg.snapshot_times = Some(vec![1.0]);
    let points = sweep(&cfg, "p", &[0.5, 1.5, 0.9]).unwrap();
    let complete: Vec<bool> = points.iter().map(|p| p.outcome.as_ref().unwrap().is_complete()).collect();
    assert_eq!(complete, [true, false, true]);
    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    assert!(summary.lines().nth(2).unwrap().contains("failed at config"));
    assert!(sweep(&cfg, "omega_c", &[1.0]).is_err());
}

#[test]
fn theta_sweep_separates_one_way_from_two_way() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::preset(Preset::Fig1);
    cfg.dt = 0.02;
    cfg.povm_samples = 100;
    cfg.cloud_points = 0;
    cfg.snapshot_times = Some(vec![500.0]);
    cfg.out_dir = tmp.path().to_path_buf();
    let points = sweep(&cfg, "theta", &[PI / 12.0, PI / 8.0]).unwrap();
    let classes: Vec<SteeringClass> = points
        .iter()
        .map(|p| p.outcome.as_ref().unwrap().report.as_ref().unwrap().classification)
        .collect();
    assert_eq!(classes, [SteeringClass::OneWayAToB, SteeringClass::TwoWay]);
}
