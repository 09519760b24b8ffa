//! Acceptance checks for `steering-ellipsoids`.
//!
//! Each criterion returns `Ok(details)` or `Err(details)`. Scenario runs use
//! dt = 0.02 over [0, 500]; the master-equation comparison uses dt = 0.01 over
//! [0, 50].

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use steering_ellipsoids::amplitude::solve_volterra;
use steering_ellipsoids::dissipative::{evolve_series, integrate_master_equation, rho_of_t, steady_state_qse};
use steering_ellipsoids::geometry::{ellipsoid_of, is_separable, Party, SteeringEllipsoid};
use steering_ellipsoids::runner::{simulate, Preset, RunConfig, Scenario};
use steering_ellipsoids::spectral::{eta_critical, markov_rates, self_energy_y, spectrum_scan, OhmicSpectralDensity};
use steering_ellipsoids::state::{pauli_decompose, TwoQubitDensity};
use steering_ellipsoids::witness::{asymptotic_witnesses, concurrence, lur_witness, SteeringDirection};

pub type Outcome = Result<String, String>;

const T_END: f64 = 500.0;

fn scenario(preset: Preset) -> &'static Scenario {
    static CACHE: [OnceLock<Scenario>; 6] = [const { OnceLock::new() }; 6];
    let slot = Preset::ALL.iter().position(|&p| p == preset).unwrap();
    CACHE[slot].get_or_init(|| {
        let mut cfg = RunConfig::preset(preset);
        cfg.dt = 0.02;
        cfg.t_max = T_END;
        simulate(&cfg).unwrap_or_else(|e| panic!("{}: {e}", preset.name()))
    })
}

fn env(eta: f64) -> OhmicSpectralDensity {
    OhmicSpectralDensity::new(eta, 1.0, 20.0).unwrap()
}

fn verdict(ok: bool, details: String) -> Outcome {
    if ok {
        Ok(details)
    } else {
        Err(details)
    }
}

/// Largest relative difference between two semiaxis triples.
fn semiaxis_error(got: &SteeringEllipsoid, expect: &SteeringEllipsoid) -> f64 {
    (0..3)
        .map(|i| (got.semiaxes[i] - expect.semiaxes[i]).abs() / expect.semiaxes[i])
        .fold(0.0, f64::max)
}

/// Indices of samples with `t ∈ [from, to]`.
fn window(s: &Scenario, from: f64, to: f64) -> std::ops::RangeInclusive<usize> {
    s.index_near(from)..=s.index_near(to)
}

/// Frequency (cycles per unit time) maximizing the Hann-windowed spectrum of
/// the de-meaned signal, refined by golden-section search.
fn dominant_frequency(t: &[f64], y: &[f64], f_max: f64) -> f64 {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let w: Vec<f64> = (0..n)
        .map(|k| (y[k] - mean) * (0.5 - 0.5 * (TAU * k as f64 / (n - 1) as f64).cos()))
        .collect();
    let power = |f: f64| {
        let z: Complex64 = t.iter().zip(&w).map(|(&tk, &wk)| Complex64::from_polar(wk, -TAU * f * tk)).sum();
        z.norm_sqr()
    };
    let span = t[n - 1] - t[0];
    let step = 0.1 / span;
    let coarse = (1..(f_max / step) as usize).map(|k| k as f64 * step);
    let best = coarse.max_by(|a, b| power(*a).total_cmp(&power(*b))).unwrap();
    let (mut lo, mut hi) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if power(x1) > power(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1() -> Outcome {
    let critical = eta_critical(1.0, 20.0);
    let grid: Vec<f64> = (40..=60).map(|k| k as f64 / 1000.0).collect();
    let rows = spectrum_scan(1.0, 20.0, &grid).map_err(|e| e.to_string())?;
    let flips_exactly = rows.iter().all(|r| r.bound_state.is_some() == (r.eta > 0.05));
    verdict(
        (critical - 0.05).abs() <= 1e-12 && flips_exactly,
        format!("eta_c = {critical:.15}; existence flips exactly above 0.05 on 21-point grid: {flips_exactly}"),
    )
}

fn criterion_2() -> Outcome {
    let s = scenario(Preset::Fig1);
    let bs = s.bound_a.ok_or("no bound state at eta = 0.06")?;
    let idx = window(s, 400.0, 500.0);
    let count = idx.clone().count() as f64;
    let mean = idx.map(|k| s.traj_a().values()[k].norm()).sum::<f64>() / count;
    let rel = (mean - bs.residue).abs() / bs.residue;
    let residual = (self_energy_y(&env(0.06), bs.energy).map_err(|e| e.to_string())? - bs.energy).abs();
    verdict(
        rel <= 0.02 && residual <= 1e-12,
        format!("mean |c| on [400,500] = {mean:.8}, Z = {:.8}, rel diff {rel:.2e}; |Y(E_b) - E_b| = {residual:.1e}", bs.residue),
    )
}

fn criterion_3() -> Outcome {
    let strong = solve_volterra(&env(0.03), T_END, 0.02).map_err(|e| e.to_string())?;
    let end = strong.values().last().unwrap().norm();

    let weak = env(0.005);
    let kappa = markov_rates(&weak).map_err(|e| e.to_string())?.kappa;
    let traj = solve_volterra(&weak, 3.0 / kappa, 0.02).map_err(|e| e.to_string())?;
    let (dev, at) = traj
        .values()
        .iter()
        .enumerate()
        .filter(|(k, _)| kappa * traj.time(*k) <= 3.0)
        .map(|(k, c)| ((c.norm() - (-kappa * traj.time(k)).exp()).abs(), kappa * traj.time(k)))
        .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    verdict(
        end <= 1e-3 && dev <= 0.02,
        format!("|c(500)| at eta = 0.03: {end:.2e} (<= 1e-3); max | |c| - e^(-kt) | at eta = 0.005: {dev:.4} at kt = {at:.2} (<= 0.02)"),
    )
}

fn criterion_4() -> Outcome {
    let s = scenario(Preset::Fig1);
    let last = s.len() - 1;
    let (za, zb) = (s.bound_a.ok_or("no bound state A")?.residue, s.bound_b.ok_or("no bound state B")?.residue);
    let params = s.series.params();
    let mut worst: f64 = 0.0;
    for party in [Party::Alice, Party::Bob] {
        let closed = steady_state_qse(party, params, za, zb).map_err(|e| e.to_string())?;
        worst = worst.max(semiaxis_error(&s.ellipsoid(party, last), &closed));
    }
    let rho = &s.series.states()[last];
    let ppt = is_separable(rho).min_eigenvalue;
    let c = concurrence(rho);
    verdict(
        worst <= 0.01 && ppt < -1e-3 && c > 0.0,
        format!("max semiaxis rel error vs closed form at Z: {worst:.2e}; min PT eigenvalue {ppt:.4}; concurrence {c:.4}"),
    )
}

fn criterion_5() -> Outcome {
    let s = scenario(Preset::Fig1);
    let idx: Vec<usize> = window(s, 300.0, 500.0).collect();
    let w: Vec<_> = idx.iter().map(|&k| s.witnesses[k]).collect();
    let swings = |f: fn(&steering_ellipsoids::witness::WitnessSample) -> f64| {
        w.iter().any(|x| f(x) > 0.01) && w.iter().any(|x| f(x) < 0.0)
    };
    let (ab_swings, ba_swings) = (swings(|x| x.ds_ab), swings(|x| x.ds_ba));

    let (ea, eb) = (s.bound_a.ok_or("no bound state A")?.energy, s.bound_b.ok_or("no bound state B")?.energy);
    let expect = (2.0 * (ea + eb)).abs() / TAU;
    let t: Vec<f64> = w.iter().map(|x| x.time).collect();
    let f_ab = dominant_frequency(&t, &w.iter().map(|x| x.ds_ab).collect::<Vec<_>>(), 1.0);
    let f_ba = dominant_frequency(&t, &w.iter().map(|x| x.ds_ba).collect::<Vec<_>>(), 1.0);
    let freq_err = ((f_ab - expect).abs().max((f_ba - expect).abs())) / expect;

    let asym = s.asymptotic_params().map_err(|e| e.to_string())?;
    let analytic_gap = w
        .iter()
        .map(|x| {
            let (ab, ba) = asymptotic_witnesses(&asym, x.time);
            (ab - x.ds_ab).abs().max((ba - x.ds_ba).abs())
        })
        .fold(0.0, f64::max);
    verdict(
        ab_swings && ba_swings && freq_err <= 0.02 && analytic_gap <= 0.02,
        format!(
            "revivals AB {ab_swings}, BA {ba_swings}; frequency AB {f_ab:.5}, BA {f_ba:.5} vs {expect:.5} (rel {freq_err:.1e}); \
             max |numeric - analytic| {analytic_gap:.1e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let s = scenario(Preset::Fig2b);
    let idx = window(s, 300.0, 500.0);
    let max_ba = idx.clone().map(|k| s.witnesses[k].ds_ba).fold(f64::NEG_INFINITY, f64::max);
    let max_ab = idx.map(|k| s.witnesses[k].ds_ab).fold(f64::NEG_INFINITY, f64::max);
    verdict(
        max_ba <= 1e-6 && max_ab > 0.01,
        format!("on [300,500]: max dS_BA = {max_ba:.4} (<= 1e-6), max dS_AB = {max_ab:.4} (> 0.01)"),
    )
}

/// Checks for a run with a bound state on `steady` only.
fn one_sided(preset: Preset, steady: Party) -> Result<(bool, String), String> {
    let s = scenario(preset);
    let last = s.len() - 1;
    let z = |b: Option<steering_ellipsoids::spectral::BoundState>| b.map_or(0.0, |b| b.residue);
    let closed = steady_state_qse(steady, s.series.params(), z(s.bound_a), z(s.bound_b)).map_err(|e| e.to_string())?;
    let err = semiaxis_error(&s.ellipsoid(steady, last), &closed);
    let collapsed = s.ellipsoid(steady.other(), last).semiaxes.max();
    let rho = &s.series.states()[last];
    let sep = is_separable(rho).separable;
    let c = concurrence(rho);
    let w = s.witnesses[last];
    let asym = s.asymptotic_params().map_err(|e| e.to_string())?;
    let (ab, ba) = asymptotic_witnesses(&asym, T_END);
    let (zero_side, negative_side) = match steady {
        Party::Alice => (ba, ab),
        Party::Bob => (ab, ba),
    };
    let ok = err <= 0.01
        && collapsed <= 1e-3
        && sep
        && c <= 1e-6
        && w.ds_ab <= 1e-6
        && w.ds_ba <= 1e-6
        && zero_side == 0.0
        && negative_side < 0.0;
    let detail = format!(
        "{}: {} semiaxis rel error {err:.1e}, {} max semiaxis {collapsed:.1e}, PPT {sep}, C {c:.1e}, dS ({:.1e}, {:.1e}), \
         asymptotic dS_AB {ab:.4}, dS_BA {ba:.4}",
        preset.name(),
        steady.label(),
        steady.other().label(),
        w.ds_ab,
        w.ds_ba
    );
    Ok((ok, detail))
}

fn criterion_7() -> Outcome {
    let (ok_a, a) = one_sided(Preset::Fig3a, Party::Alice)?;
    let (ok_b, b) = one_sided(Preset::Fig3b, Party::Bob)?;
    verdict(ok_a && ok_b, format!("{a}; {b}"))
}

fn criterion_8() -> Outcome {
    let s = scenario(Preset::Fig4);
    let last = s.len() - 1;
    let worst = [Party::Alice, Party::Bob]
        .iter()
        .map(|&p| s.ellipsoid(p, last).semiaxes.max())
        .fold(0.0, f64::max);
    let dist = s.series.states()[last].trace_distance(&TwoQubitDensity::ground());
    verdict(
        worst <= 1e-3 && dist <= 1e-3,
        format!("max semiaxis {worst:.1e}; trace distance to |gg> {dist:.1e}"),
    )
}

fn criterion_9() -> Outcome {
    let diffs: Vec<(Preset, f64)> = Preset::ALL
        .par_iter()
        .map(|&preset| {
            let cfg = RunConfig::preset(preset);
            let a = Arc::new(solve_volterra(&cfg.env_a().unwrap(), 50.0, 0.01).unwrap());
            let b = Arc::new(solve_volterra(&cfg.env_b().unwrap(), 50.0, 0.01).unwrap());
            let params = cfg.initial().unwrap();
            let closed = evolve_series(params, a.clone(), b.clone()).unwrap();
            let oracle = integrate_master_equation(params, a, b, Some(50.0)).unwrap();
            (preset, closed.max_element_difference(&oracle))
        })
        .collect();
    let worst = diffs.iter().map(|d| d.1).fold(0.0, f64::max);
    let listing: Vec<String> = diffs.iter().map(|(p, d)| format!("{} {d:.1e}", p.name())).collect();
    verdict(worst <= 1e-6, format!("max element difference on [0,50]: {}", listing.join(", ")))
}

fn criterion_10() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut invalid = 0;
    let mut excess: f64 = 0.0;
    let mut inconsistent = 0;
    let mut transcription: f64 = 0.0;
    for preset in Preset::ALL {
        let s = scenario(preset);
        let r = s.report().map_err(|e| e.to_string())?;
        invalid += r.invalid_samples;
        excess = excess.max(r.max_containment_excess);
        inconsistent += r.steering_without_entanglement;
        inconsistent += s
            .series
            .states()
            .par_iter()
            .zip(s.witnesses.par_iter())
            .filter(|(rho, w)| {
                let v = is_separable(rho);
                (w.concurrence > 1e-6 && v.separable) || (w.concurrence == 0.0 && v.min_eigenvalue < -1e-6)
            })
            .count();

        let asym = s.asymptotic_params().map_err(|e| e.to_string())?;
        let params = s.series.params();
        let (za, zb, ea, eb) = (asym.z_a(), asym.z_b(), asym.eb_a(), asym.eb_b());
        for k in 0..=200 {
            let t = 300.0 + k as f64;
            let rho = rho_of_t(params, Complex64::from_polar(za, -ea * t), Complex64::from_polar(zb, -eb * t))
                .map_err(|e| e.to_string())?;
            let (ab, ba) = asymptotic_witnesses(&asym, t);
            let d_ab = lur_witness(&rho, SteeringDirection::AToB).value;
            let d_ba = lur_witness(&rho, SteeringDirection::BToA).value;
            transcription = transcription.max((ab - d_ab).abs()).max((ba - d_ba).abs());
        }
    }
    ok &= invalid == 0 && excess <= 1e-6 && inconsistent == 0 && transcription <= 1e-8;
    notes.push(format!(
        "invalid samples {invalid}; containment excess {excess:.1e} (1e4 POVMs per snapshot); consistency violations {inconsistent}; \
         asymptotic witness transcription {transcription:.1e}"
    ));

    let bell = TwoQubitDensity::bell();
    let pf = pauli_decompose(&bell);
    let sphere = [Party::Alice, Party::Bob].iter().all(|&p| {
        let e = ellipsoid_of(&pf, p, None);
        e.center.norm() < 1e-12 && (0..3).all(|i| (e.semiaxes[i] - 1.0).abs() < 1e-12)
    });
    let c = concurrence(&bell);
    let ds = [SteeringDirection::AToB, SteeringDirection::BToA].map(|d| lur_witness(&bell, d).value);
    let bell_ok = sphere && (c - 1.0).abs() < 1e-12 && ds.iter().all(|x| (x - 2.0).abs() < 1e-12);
    ok &= bell_ok;
    notes.push(format!("Bell: unit sphere {sphere}, C = {c:.12}, dS = ({:.12}, {:.12})", ds[0], ds[1]));
    verdict(ok, notes.join("; "))
}

/// Runs all criteria in parallel and returns `(number, outcome)` in order.
pub fn run_all() -> Vec<(u32, Outcome)> {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    // Warm the scenario cache in parallel before the checks read it.
    Preset::ALL.par_iter().for_each(|&p| {
        let _ = catch_unwind(|| scenario(p));
    });
    criteria
        .par_iter()
        .map(|&(n, check)| {
            let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
            (n, outcome)
        })
        .collect()
}
