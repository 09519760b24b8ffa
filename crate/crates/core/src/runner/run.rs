//! The simulation pipeline: environments, amplitudes, states, geometry and
//! witnesses, then files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::RunConfig;
use super::output;
use crate::amplitude::{convergence_gap, solve_volterra, AmplitudeTrajectory};
use crate::dissipative::{evolve_series, steady_state_qse, EvolvedStateSeries};
use crate::error::{Error, Result};
use crate::geometry::{ellipsoid_of, is_separable, steered_bloch, Party, SteeringEllipsoid};
use crate::spectral::{find_bound_state, BoundState};
use crate::state::{pauli_decompose, Vec3};
use crate::witness::{witness_series, AsymptoticWitnessParams, WitnessSample};

/// Version of the file layout written by [`run_scenario`].
pub const SCHEMA_VERSION: u32 = 1;

/// Witness values above this count as steering in the classification.
pub const STEERING_THRESHOLD: f64 = 1e-6;

/// Parameters accepted by [`sweep`].
pub const SWEEP_PARAMS: [&str; 4] = ["eta_A", "eta_B", "p", "theta"];

/// Start of the late window as a fraction of `t_max`.
pub const LATE_WINDOW_FRACTION: f64 = 0.6;

/// Semiaxes at or below this are treated as collapsed in the containment check.
const COLLAPSE_FLOOR: f64 = 1e-12;

/// Witness value above which a state is required to be entangled.
const CONSISTENCY_TOL: f64 = 1e-9;

/// Pipeline stage, for failure reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Spectrum,
    Amplitude,
    States,
    Diagnostics,
    Output,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Spectrum => "spectrum",
            Stage::Amplitude => "amplitude",
            Stage::States => "states",
            Stage::Diagnostics => "diagnostics",
            Stage::Output => "output",
        }
    }
}

/// An error tagged with the stage that raised it.
#[derive(Debug)]
pub struct StageFailure {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage: {}", self.stage.name(), self.error)
    }
}

impl std::error::Error for StageFailure {}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageFailure>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageFailure> {
        self.map_err(|error| StageFailure { stage, error })
    }
}

/// Steering classification over the late window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringClass {
    TwoWay,
    /// Only `ΔS_AB` certifies steering.
    OneWayAToB,
    /// Only `ΔS_BA` certifies steering.
    OneWayBToA,
    None,
}

impl SteeringClass {
    pub fn from_maxima(max_ab: f64, max_ba: f64) -> Self {
        match (max_ab > STEERING_THRESHOLD, max_ba > STEERING_THRESHOLD) {
            (true, true) => SteeringClass::TwoWay,
            (true, false) => SteeringClass::OneWayAToB,
            (false, true) => SteeringClass::OneWayBToA,
            (false, false) => SteeringClass::None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SteeringClass::TwoWay => "two-way",
            SteeringClass::OneWayAToB => "one-way A->B",
            SteeringClass::OneWayBToA => "one-way B->A",
            SteeringClass::None => "none",
        }
    }
}

/// In-memory result of the numerical pipeline.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: RunConfig,
    pub bound_a: Option<BoundState>,
    pub bound_b: Option<BoundState>,
    pub series: EvolvedStateSeries,
    pub witnesses: Vec<WitnessSample>,
    /// `max |c_dt − c_2dt|` per side.
    pub convergence_gap_a: f64,
    pub convergence_gap_b: f64,
}

/// Runs every numerical stage without touching the filesystem.
pub fn simulate(cfg: &RunConfig) -> std::result::Result<Scenario, StageFailure> {
    simulate_tracked(cfg, &mut None)
}

type BoundPair = (Option<BoundState>, Option<BoundState>);

/// [`simulate`], recording the bound states as soon as they are known.
fn simulate_tracked(cfg: &RunConfig, bound: &mut Option<BoundPair>) -> std::result::Result<Scenario, StageFailure> {
    cfg.validate().at(Stage::Config)?;
    let env_a = cfg.env_a().at(Stage::Config)?;
    let env_b = cfg.env_b().at(Stage::Config)?;
    let params = cfg.initial().at(Stage::Config)?;

    let (bound_a, bound_b) = rayon::join(|| find_bound_state(&env_a), || find_bound_state(&env_b));
    let (bound_a, bound_b) = (bound_a.at(Stage::Spectrum)?, bound_b.at(Stage::Spectrum)?);
    *bound = Some((bound_a, bound_b));

    let solve_side = |env| -> Result<(AmplitudeTrajectory, f64)> {
        let (fine, coarse) = rayon::join(
            || solve_volterra(env, cfg.t_max, cfg.dt),
            || solve_volterra(env, cfg.t_max, 2.0 * cfg.dt),
        );
        let fine = fine?;
        let gap = convergence_gap(&fine, &coarse?)?;
        Ok((fine, gap))
    };
    let ((traj_a, gap_a), (traj_b, gap_b)) = if env_a == env_b {
        let (traj, gap) = solve_side(&env_a).at(Stage::Amplitude)?;
        let traj = Arc::new(traj);
        ((Arc::clone(&traj), gap), (traj, gap))
    } else {
        let (a, b) = rayon::join(|| solve_side(&env_a), || solve_side(&env_b));
        let ((ta, ga), (tb, gb)) = (a.at(Stage::Amplitude)?, b.at(Stage::Amplitude)?);
        ((Arc::new(ta), ga), (Arc::new(tb), gb))
    };

    let series = evolve_series(params, traj_a, traj_b).at(Stage::States)?;
    let witnesses = witness_series(&series);
    Ok(Scenario {
        config: cfg.clone(),
        bound_a,
        bound_b,
        series,
        witnesses,
        convergence_gap_a: gap_a,
        convergence_gap_b: gap_b,
    })
}

/// Summary figures of a completed scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub max_hermiticity_defect: f64,
    pub max_trace_defect: f64,
    pub min_eigenvalue: f64,
    /// Samples failing the density-matrix tolerances.
    pub invalid_samples: usize,
    /// Largest ellipsoid-frame excess of a steered state over all snapshots
    /// and POVM samples.
    pub max_containment_excess: f64,
    /// POVM samples skipped because the outcome has zero probability.
    pub singular_povm_samples: usize,
    /// Samples where a witness certifies steering but the state is separable.
    pub steering_without_entanglement: usize,
    pub final_abs_c_a: f64,
    pub final_abs_c_b: f64,
    pub final_ellipsoid_a: SteeringEllipsoid,
    pub final_ellipsoid_b: SteeringEllipsoid,
    /// Closed-form long-time ellipsoids at `|c_j| = Z_j`.
    pub steady_ellipsoid_a: Option<SteeringEllipsoid>,
    pub steady_ellipsoid_b: Option<SteeringEllipsoid>,
    pub final_concurrence: f64,
    pub final_ppt_min_eigenvalue: f64,
    pub late_window_start: f64,
    pub max_ds_ab_late: f64,
    pub max_ds_ba_late: f64,
    pub classification: SteeringClass,
}

impl Scenario {
    pub fn traj_a(&self) -> &AmplitudeTrajectory {
        self.series.traj_a()
    }

    pub fn traj_b(&self) -> &AmplitudeTrajectory {
        self.series.traj_b()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Grid index nearest to `t`, clamped to the grid.
    pub fn index_near(&self, t: f64) -> usize {
        let k = (t / self.traj_a().dt()).round().max(0.0) as usize;
        k.min(self.len() - 1)
    }

    /// Steering ellipsoid of `party` at sample `k`.
    pub fn ellipsoid(&self, party: Party, k: usize) -> SteeringEllipsoid {
        ellipsoid_of(&pauli_decompose(&self.series.states()[k]), party, None)
    }

    /// Rows kept in the time series: every `stride`-th sample plus the last.
    pub fn decimated_indices(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = (0..self.len()).step_by(self.config.stride).collect();
        if rows.last() != Some(&(self.len() - 1)) {
            rows.push(self.len() - 1);
        }
        rows
    }

    /// Inputs of the long-time witness formulas, from the bound states found.
    pub fn asymptotic_params(&self) -> Result<AsymptoticWitnessParams> {
        let split = |b: Option<BoundState>| b.map_or((0.0, 0.0), |b| (b.residue, b.energy));
        let (z_a, e_a) = split(self.bound_a);
        let (z_b, e_b) = split(self.bound_b);
        AsymptoticWitnessParams::new(self.series.params(), z_a, z_b, e_a, e_b)
    }

    /// Samples with `t ≥ LATE_WINDOW_FRACTION · t_max`.
    pub fn late_window(&self) -> &[WitnessSample] {
        let start = LATE_WINDOW_FRACTION * self.config.t_max;
        let first = self.witnesses.partition_point(|w| w.time < start - 1e-9);
        &self.witnesses[first..]
    }

    /// Largest excess `max(√(Σ(y/l)²) − 1, off-axis offset)` of steered
    /// states over seeded unit POVM directions at sample `k`, together with
    /// the number of zero-probability outcomes skipped.
    pub fn containment_excess(&self, k: usize, samples: usize, seed: u64) -> (f64, usize) {
        let pf = pauli_decompose(&self.series.states()[k]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut skipped = 0;
        for party in [Party::Alice, Party::Bob] {
            let ell = ellipsoid_of(&pf, party, None);
            for _ in 0..samples {
                let z: f64 = rng.random_range(-1.0..=1.0);
                let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let rxy = (1.0 - z * z).max(0.0).sqrt();
                let e = Vec3::new(rxy * phi.cos(), rxy * phi.sin(), z);
                match steered_bloch(&pf, &e, party.other()) {
                    Ok(point) => {
                        let (radius, off_axis) = ell.normalized_radius(&point, COLLAPSE_FLOOR);
                        worst = worst.max(radius.sqrt() - 1.0).max(off_axis);
                    }
                    Err(_) => skipped += 1,
                }
            }
        }
        (worst, skipped)
    }

    /// Validity, containment, consistency and long-time figures.
    pub fn report(&self) -> Result<ScenarioReport> {
        let cfg = &self.config;
        let states = self.series.states();
        let (herm, trace, min_eig, invalid) = states
            .par_iter()
            .map(|rho| {
                let d = rho.validate();
                (d.hermiticity_defect, d.trace_defect, d.min_eigenvalue, usize::from(!d.is_valid()))
            })
            .reduce(
                || (0.0, 0.0, f64::INFINITY, 0),
                |x, y| (x.0.max(y.0), x.1.max(y.1), x.2.min(y.2), x.3 + y.3),
            );

        let steering_without_entanglement = states
            .par_iter()
            .zip(self.witnesses.par_iter())
            .filter(|(rho, w)| {
                (w.ds_ab > CONSISTENCY_TOL || w.ds_ba > CONSISTENCY_TOL) && (w.concurrence <= 0.0 || is_separable(rho).separable)
            })
            .count();

        let snapshots: Vec<usize> = cfg.snapshots().iter().map(|&t| self.index_near(t)).collect();
        let (max_containment_excess, singular_povm_samples) = snapshots
            .par_iter()
            .enumerate()
            .map(|(i, &k)| self.containment_excess(k, cfg.povm_samples, cfg.seed.wrapping_add(i as u64)))
            .reduce(|| (0.0, 0), |x, y| (x.0.max(y.0), x.1 + y.1));

        let last = self.len() - 1;
        let params = self.series.params();
        let z = |b: Option<BoundState>| b.map_or(0.0, |b| b.residue);
        let (z_a, z_b) = (z(self.bound_a), z(self.bound_b));
        let late = self.late_window();
        let max_ds_ab_late = late.iter().map(|w| w.ds_ab).fold(f64::NEG_INFINITY, f64::max);
        let max_ds_ba_late = late.iter().map(|w| w.ds_ba).fold(f64::NEG_INFINITY, f64::max);
        Ok(ScenarioReport {
            max_hermiticity_defect: herm,
            max_trace_defect: trace,
            min_eigenvalue: min_eig,
            invalid_samples: invalid,
            max_containment_excess,
            singular_povm_samples,
            steering_without_entanglement,
            final_abs_c_a: self.traj_a().values()[last].norm(),
            final_abs_c_b: self.traj_b().values()[last].norm(),
            final_ellipsoid_a: self.ellipsoid(Party::Alice, last),
            final_ellipsoid_b: self.ellipsoid(Party::Bob, last),
            steady_ellipsoid_a: steady_state_qse(Party::Alice, params, z_a, z_b).ok(),
            steady_ellipsoid_b: steady_state_qse(Party::Bob, params, z_a, z_b).ok(),
            final_concurrence: self.witnesses[last].concurrence,
            final_ppt_min_eigenvalue: is_separable(&states[last]).min_eigenvalue,
            late_window_start: LATE_WINDOW_FRACTION * cfg.t_max,
            max_ds_ab_late,
            max_ds_ba_late,
            classification: SteeringClass::from_maxima(max_ds_ab_late, max_ds_ba_late),
        })
    }
}

/// Outcome of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Complete,
    Failed { stage: Stage, message: String },
}

/// Record of one run, mirrored in `manifest.txt`.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub out_dir: PathBuf,
    pub status: RunStatus,
    /// Bound states per side, when the spectrum stage completed.
    pub bound_states: Option<BoundPair>,
    pub report: Option<ScenarioReport>,
    /// Ordered `key = value` lines of the manifest.
    pub entries: Vec<(String, String)>,
    /// Output files, relative to `out_dir`; the manifest itself excluded.
    pub files: Vec<String>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Complete
    }

    /// Value of a manifest key.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Runs the pipeline and writes every output into `cfg.out_dir`. Numerical
/// failures are recorded in the manifest; only failing to create the output
/// directory or write the manifest is an error.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunManifest> {
    let started = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut manifest = RunManifest {
        out_dir: cfg.out_dir.clone(),
        status: RunStatus::Complete,
        bound_states: None,
        report: None,
        entries: Vec::new(),
        files: Vec::new(),
        wall_time_s: 0.0,
    };
    if let Err(failure) = run_stages(cfg, &mut manifest) {
        manifest.status = RunStatus::Failed {
            stage: failure.stage,
            message: failure.error.to_string(),
        };
    }
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.entries = output::manifest_entries(cfg, &manifest);
    output::write_manifest(&cfg.out_dir.join("manifest.txt"), &manifest.entries)?;
    Ok(manifest)
}

fn run_stages(cfg: &RunConfig, manifest: &mut RunManifest) -> std::result::Result<(), StageFailure> {
    let dir = cfg.out_dir.as_path();
    let scenario = simulate_tracked(cfg, &mut manifest.bound_states)?;

    let mut write = |name: String, result: Result<()>| -> std::result::Result<(), StageFailure> {
        result.at(Stage::Output)?;
        manifest.files.push(name);
        Ok(())
    };
    let spectrum = [(cfg.eta_a, scenario.bound_a), (cfg.eta_b, scenario.bound_b)];
    write("spectrum.csv".into(), output::write_spectrum(&dir.join("spectrum.csv"), &spectrum))?;
    write("trajectory_A.csv".into(), output::write_trajectory(&dir.join("trajectory_A.csv"), scenario.traj_a()))?;
    write("trajectory_B.csv".into(), output::write_trajectory(&dir.join("trajectory_B.csv"), scenario.traj_b()))?;
    write("timeseries.csv".into(), output::write_timeseries(&dir.join("timeseries.csv"), &scenario))?;
    for t in cfg.snapshots() {
        let k = scenario.index_near(t);
        for party in [Party::Alice, Party::Bob] {
            let name = format!("ellipsoid_{}_{}.csv", party.label(), output::time_label(t));
            let ell = scenario.ellipsoid(party, k);
            write(name.clone(), output::write_ellipsoid(&dir.join(&name), &ell, cfg.cloud_points))?;
        }
    }

    manifest.report = Some(scenario.report().at(Stage::Diagnostics)?);
    Ok(())
}

/// One row of a sweep summary.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub run_dir: PathBuf,
    /// The run's manifest, or the error that kept it from being written.
    pub outcome: std::result::Result<RunManifest, String>,
}

/// Runs `template` once per grid value of `param` (one of `eta_A`, `eta_B`,
/// `p`, `theta`) in `template.out_dir/<param>_<index>`, and writes
/// `summary.csv` there. Failing points are recorded without stopping the
/// sweep.
pub fn sweep(template: &RunConfig, param: &str, grid: &[f64]) -> Result<Vec<SweepPoint>> {
    if !SWEEP_PARAMS.contains(&param) {
        return Err(Error::ConfigField {
            field: param.to_string(),
            message: format!("not a sweepable parameter; expected one of {}", SWEEP_PARAMS.join(", ")),
        });
    }
    std::fs::create_dir_all(&template.out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(template.workers)
        .build()
        .map_err(|e| Error::Numerical {
            stage: "sweep",
            detail: e.to_string(),
        })?;
    let points = pool.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(i, &value)| sweep_point(template, param, i, value))
            .collect::<Vec<_>>()
    });
    output::write_summary(&template.out_dir.join("summary.csv"), param, &points)?;
    Ok(points)
}

fn sweep_point(template: &RunConfig, param: &str, index: usize, value: f64) -> SweepPoint {
    let mut cfg = template.clone();
    let run_dir = template.out_dir.join(format!("{param}_{index}"));
    cfg.out_dir = run_dir.clone();
    cfg.label = format!("{}_{param}_{index}", template.label);
    let outcome = cfg
        .set_value(param, value)
        .and_then(|()| run_scenario(&cfg))
        .map_err(|e| e.to_string());
    SweepPoint { value, run_dir, outcome }
}

/// Writes `spectrum.csv` for an η scan.
pub fn write_spectrum_scan(path: &Path, rows: &[crate::spectral::SpectrumPoint]) -> Result<()> {
    let rows: Vec<(f64, Option<BoundState>)> = rows.iter().map(|r| (r.eta, r.bound_state)).collect();
    output::write_spectrum(path, &rows)
}
