//! File formats. Every number is written as `{:.10e}`; absent values are
//! empty fields.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::RunConfig;
use super::run::{RunManifest, RunStatus, Scenario, SweepPoint, SCHEMA_VERSION};
use crate::amplitude::AmplitudeTrajectory;
use crate::error::Result;
use crate::geometry::{is_separable, Party, SteeringEllipsoid};
use crate::spectral::BoundState;
use crate::state::{pauli_decompose, Vec3};
use rayon::prelude::*;

pub(crate) fn num(x: f64) -> String {
    format!("{x:.10e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn vec3(v: &Vec3) -> String {
    format!("{},{},{}", num(v[0]), num(v[1]), num(v[2]))
}

/// File-name form of a snapshot time: `500`, `12.5`.
pub fn time_label(t: f64) -> String {
    format!("{t}")
}

/// `eta,bound_energy,residue_Z`.
pub fn write_spectrum(path: &Path, rows: &[(f64, Option<BoundState>)]) -> Result<()> {
    let mut out = String::from("eta,bound_energy,residue_Z\n");
    for (eta, bs) in rows {
        let _ = writeln!(out, "{},{},{}", num(*eta), opt(bs.map(|b| b.energy)), opt(bs.map(|b| b.residue)));
    }
    Ok(fs::write(path, out)?)
}

/// `t,re_c,im_c,abs_c` at every grid sample.
pub fn write_trajectory(path: &Path, traj: &AmplitudeTrajectory) -> Result<()> {
    let mut out = String::from("t,re_c,im_c,abs_c\n");
    for (k, c) in traj.values().iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", num(traj.time(k)), num(c.re), num(c.im), num(c.norm()));
    }
    Ok(fs::write(path, out)?)
}

pub const TIMESERIES_HEADER: &str =
    "t,abs_cA,abs_cB,cA_x,cA_y,cA_z,lA_1,lA_2,lA_3,cB_x,cB_y,cB_z,lB_1,lB_2,lB_3,concurrence,dS_AB,dS_BA,ppt_min_eig";

/// One row per decimated sample; see [`TIMESERIES_HEADER`].
pub fn write_timeseries(path: &Path, scenario: &Scenario) -> Result<()> {
    let rows: Vec<String> = scenario
        .decimated_indices()
        .par_iter()
        .map(|&k| {
            let rho = &scenario.series.states()[k];
            let pf = pauli_decompose(rho);
            let ell_a = crate::geometry::ellipsoid_of(&pf, Party::Alice, None);
            let ell_b = crate::geometry::ellipsoid_of(&pf, Party::Bob, None);
            let w = &scenario.witnesses[k];
            format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                num(scenario.series.times()[k]),
                num(scenario.traj_a().values()[k].norm()),
                num(scenario.traj_b().values()[k].norm()),
                vec3(&ell_a.center),
                vec3(&ell_a.semiaxes),
                vec3(&ell_b.center),
                vec3(&ell_b.semiaxes),
                num(w.concurrence),
                num(w.ds_ab),
                num(w.ds_ba),
                num(is_separable(rho).min_eigenvalue),
            )
        })
        .collect();
    let mut out = String::with_capacity(rows.len() * 360);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    rows.iter().for_each(|r| out.push_str(r));
    Ok(fs::write(path, out)?)
}

pub const ELLIPSOID_HEADER: &str = "center_x,center_y,center_z,l_1,l_2,l_3,\
axis1_x,axis1_y,axis1_z,axis2_x,axis2_y,axis2_z,axis3_x,axis3_y,axis3_z,degenerate";

/// Unit vectors of the spherical Fibonacci lattice with `n` points.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// [`ELLIPSOID_HEADER`], one parameter row, then `x,y,z` and the surface
/// point cloud.
pub fn write_ellipsoid(path: &Path, ell: &SteeringEllipsoid, cloud_points: usize) -> Result<()> {
    let mut out = String::from(ELLIPSOID_HEADER);
    out.push('\n');
    let axes = (0..3).map(|c| vec3(&ell.axes.column(c).into_owned())).collect::<Vec<_>>().join(",");
    let _ = writeln!(out, "{},{},{},{}", vec3(&ell.center), vec3(&ell.semiaxes), axes, u8::from(ell.degenerate));
    out.push_str("x,y,z\n");
    for u in fibonacci_sphere(cloud_points) {
        let _ = writeln!(out, "{}", vec3(&ell.surface_point(&u)));
    }
    Ok(fs::write(path, out)?)
}

fn bound_entries(entries: &mut Vec<(String, String)>, side: &str, bs: Option<BoundState>) {
    let present = if bs.is_some() { "present" } else { "absent" };
    entries.push((format!("bound_state_{side}"), present.into()));
    entries.push((format!("bound_energy_{side}"), opt(bs.map(|b| b.energy))));
    entries.push((format!("residue_Z_{side}"), opt(bs.map(|b| b.residue))));
}

fn semiaxes(ell: Option<&SteeringEllipsoid>) -> String {
    ell.map(|e| vec3(&e.semiaxes)).unwrap_or_default()
}

/// The manifest as ordered key/value pairs.
pub fn manifest_entries(cfg: &RunConfig, m: &RunManifest) -> Vec<(String, String)> {
    let mut e: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: String| e.push((k.to_string(), v));
    push("schema_version", SCHEMA_VERSION.to_string());
    match &m.status {
        RunStatus::Complete => push("status", "complete".into()),
        RunStatus::Failed { stage, message } => {
            push("status", "failed".into());
            push("failed_stage", stage.name().into());
            push("error", message.replace('\n', " "));
        }
    }
    push("label", cfg.label.clone());
    push("s", num(cfg.s));
    push("omega_c", num(cfg.omega_c));
    push("eta_A", num(cfg.eta_a));
    push("eta_B", num(cfg.eta_b));
    push("p", num(cfg.p));
    push("theta", num(cfg.theta));
    push("dt", num(cfg.dt));
    push("t_max", num(cfg.t_max));
    push("snapshot_times", cfg.snapshots().iter().map(|&t| num(t)).collect::<Vec<_>>().join(","));
    push("povm_samples", cfg.povm_samples.to_string());
    push("seed", cfg.seed.to_string());
    push("stride", cfg.stride.to_string());
    push("cloud_points", cfg.cloud_points.to_string());
    if let Some((a, b)) = m.bound_states {
        bound_entries(&mut e, "A", a);
        bound_entries(&mut e, "B", b);
    }
    let mut push = |k: &str, v: String| e.push((k.to_string(), v));
    if let Some(r) = &m.report {
        push("max_hermiticity_defect", num(r.max_hermiticity_defect));
        push("max_trace_defect", num(r.max_trace_defect));
        push("min_eigenvalue", num(r.min_eigenvalue));
        push("invalid_samples", r.invalid_samples.to_string());
        push("max_containment_excess", num(r.max_containment_excess));
        push("singular_povm_samples", r.singular_povm_samples.to_string());
        push("steering_without_entanglement", r.steering_without_entanglement.to_string());
        push("final_abs_cA", num(r.final_abs_c_a));
        push("final_abs_cB", num(r.final_abs_c_b));
        push("final_semiaxes_A", semiaxes(Some(&r.final_ellipsoid_a)));
        push("final_semiaxes_B", semiaxes(Some(&r.final_ellipsoid_b)));
        push("steady_semiaxes_A", semiaxes(r.steady_ellipsoid_a.as_ref()));
        push("steady_semiaxes_B", semiaxes(r.steady_ellipsoid_b.as_ref()));
        push("final_concurrence", num(r.final_concurrence));
        push("final_ppt_min_eig", num(r.final_ppt_min_eigenvalue));
        push("late_window_start", num(r.late_window_start));
        push("max_dS_AB_late", num(r.max_ds_ab_late));
        push("max_dS_BA_late", num(r.max_ds_ba_late));
        push("classification", r.classification.label().into());
    }
    push("files", m.files.join(","));
    push("wall_time_s", format!("{:.3}", m.wall_time_s));
    e
}

pub fn write_manifest(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in entries {
        let _ = writeln!(out, "{k} = {v}");
    }
    Ok(fs::write(path, out)?)
}

pub const SUMMARY_HEADER: &str = "param,value,status,bound_energy_A,residue_Z_A,bound_energy_B,residue_Z_B,\
max_dS_AB_late,max_dS_BA_late,final_concurrence,classification,run_dir";

/// One row per sweep point; failed points carry their error as status.
pub fn write_summary(path: &Path, param: &str, points: &[SweepPoint]) -> Result<()> {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for pt in points {
        let dir = pt.run_dir.display();
        let row = match &pt.outcome {
            Err(message) => format!("error: {}", message.replace([',', '\n'], ";")) + ",,,,,,,,",
            Ok(m) => {
                let status = match &m.status {
                    RunStatus::Complete => "complete".to_string(),
                    RunStatus::Failed { stage, .. } => format!("failed at {}", stage.name()),
                };
                let (a, b) = m.bound_states.unwrap_or((None, None));
                let r = m.report.as_ref();
                format!(
                    "{status},{},{},{},{},{},{},{},{}",
                    opt(a.map(|x| x.energy)),
                    opt(a.map(|x| x.residue)),
                    opt(b.map(|x| x.energy)),
                    opt(b.map(|x| x.residue)),
                    opt(r.map(|r| r.max_ds_ab_late)),
                    opt(r.map(|r| r.max_ds_ba_late)),
                    opt(r.map(|r| r.final_concurrence)),
                    r.map(|r| r.classification.label()).unwrap_or_default(),
                )
            }
        };
        let _ = writeln!(out, "{param},{},{row},{dir}", num(pt.value));
    }
    Ok(fs::write(path, out)?)
}
