//! Run configuration: flat `key = value` files, built-in presets and grids.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::spectral::OhmicSpectralDensity;
use crate::state::InitialFamilyParams;

/// Named parameter sets for the reference scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Equal couplings above threshold, `p = 0.9`, `θ = π/8`.
    Fig1,
    /// Same parameters as [`Preset::Fig1`].
    Fig2a,
    /// As [`Preset::Fig1`] with `θ = π/12`.
    Fig2b,
    /// Bound state on Alice's side only, `p = 0.8`, `θ = π/3`.
    Fig3a,
    /// Mirror of [`Preset::Fig3a`]: bound state on Bob's side only.
    Fig3b,
    /// Both couplings below threshold.
    Fig4,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig1,
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4 => "fig4",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    /// `(η_A, η_B, p, θ)`; all presets use `s = 1`, `ω_c = 20`.
    fn physical(self) -> (f64, f64, f64, f64) {
        match self {
            Preset::Fig1 | Preset::Fig2a => (0.06, 0.06, 0.9, PI / 8.0),
            Preset::Fig2b => (0.06, 0.06, 0.9, PI / 12.0),
            Preset::Fig3a => (0.06, 0.03, 0.8, PI / 3.0),
            Preset::Fig3b => (0.03, 0.06, 0.8, PI / 3.0),
            Preset::Fig4 => (0.03, 0.03, 0.8, PI / 3.0),
        }
    }
}

pub const DEFAULT_DT: f64 = 1e-2;
pub const DEFAULT_T_MAX: f64 = 500.0;
pub const DEFAULT_POVM_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_STRIDE: usize = 10;
pub const DEFAULT_CLOUD_POINTS: usize = 2048;

/// Everything needed for one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Name used for the default output directory and in the manifest.
    pub label: String,
    pub s: f64,
    pub omega_c: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub p: f64,
    pub theta: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Ellipsoid export times; `None` means `0, 10, 50, 100, t_max`.
    pub snapshot_times: Option<Vec<f64>>,
    /// Seeded POVM directions drawn per snapshot for the containment check.
    pub povm_samples: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Time-series decimation.
    pub stride: usize,
    /// Surface points per exported ellipsoid; 0 disables the cloud.
    pub cloud_points: usize,
    /// Sweep worker threads; 0 uses all cores.
    pub workers: usize,
}

impl RunConfig {
    /// A preset with all defaults filled in.
    pub fn preset(preset: Preset) -> RunConfig {
        let (eta_a, eta_b, p, theta) = preset.physical();
        RunConfig {
            label: preset.name().to_string(),
            s: 1.0,
            omega_c: 20.0,
            eta_a,
            eta_b,
            p,
            theta,
            dt: DEFAULT_DT,
            t_max: DEFAULT_T_MAX,
            snapshot_times: None,
            povm_samples: DEFAULT_POVM_SAMPLES,
            seed: DEFAULT_SEED,
            out_dir: PathBuf::from("runs").join(preset.name()),
            stride: DEFAULT_STRIDE,
            cloud_points: DEFAULT_CLOUD_POINTS,
            workers: 0,
        }
    }

    /// Snapshot times after filling the default.
    pub fn snapshots(&self) -> Vec<f64> {
        match &self.snapshot_times {
            Some(t) => t.clone(),
            None => {
                let mut t: Vec<f64> = [0.0, 10.0, 50.0, 100.0].into_iter().filter(|&x| x < self.t_max).collect();
                t.push(self.t_max);
                t
            }
        }
    }

    pub fn env_a(&self) -> Result<OhmicSpectralDensity> {
        OhmicSpectralDensity::new(self.eta_a, self.s, self.omega_c).map_err(|e| field("eta_A", e))
    }

    pub fn env_b(&self) -> Result<OhmicSpectralDensity> {
        OhmicSpectralDensity::new(self.eta_b, self.s, self.omega_c).map_err(|e| field("eta_B", e))
    }

    pub fn initial(&self) -> Result<InitialFamilyParams> {
        InitialFamilyParams::new(self.p, self.theta).map_err(|e| field("p/theta", e))
    }

    /// Checks every field against its domain.
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(field_msg("s", format!("{} must be positive", self.s)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(field_msg("omega_c", format!("{} must be positive", self.omega_c)));
        }
        self.env_a()?;
        self.env_b()?;
        if !(0.0..=1.0).contains(&self.p) {
            return Err(field_msg("p", format!("{} must lie in [0, 1]", self.p)));
        }
        if !self.theta.is_finite() {
            return Err(field_msg("theta", "must be finite".into()));
        }
        self.initial()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(field_msg("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt) {
            return Err(field_msg("t_max", format!("{} must be finite and at least dt", self.t_max)));
        }
        for &t in &self.snapshots() {
            if !(0.0..=self.t_max).contains(&t) {
                return Err(field_msg("snapshot_times", format!("{t} lies outside [0, t_max]")));
            }
        }
        if self.stride == 0 {
            return Err(field_msg("stride", "must be at least 1".into()));
        }
        Ok(())
    }

    /// Sets one field from its textual value, as in a config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "label" => self.label = value.to_string(),
            "s" => self.s = parse_f64(key, value)?,
            "omega_c" => self.omega_c = parse_f64(key, value)?,
            "eta_A" => self.eta_a = parse_f64(key, value)?,
            "eta_B" => self.eta_b = parse_f64(key, value)?,
            "p" => self.p = parse_f64(key, value)?,
            "theta" => self.theta = parse_angle(value).ok_or_else(|| field_msg(key, format!("cannot parse `{value}`")))?,
            "dt" => self.dt = parse_f64(key, value)?,
            "t_max" => self.t_max = parse_f64(key, value)?,
            "snapshot_times" => {
                let list = value
                    .split(',')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                    .map(|v| parse_f64(key, v))
                    .collect::<Result<Vec<_>>>()?;
                self.snapshot_times = Some(list);
            }
            "povm_samples" => self.povm_samples = parse_int(key, value)?,
            "seed" => self.seed = parse_int(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "stride" => self.stride = parse_int(key, value)?,
            "cloud_points" => self.cloud_points = parse_int(key, value)?,
            "workers" => self.workers = parse_int(key, value)?,
            _ => return Err(field_msg(key, "unknown key".into())),
        }
        Ok(())
    }

    /// Sets a swept parameter from a number.
    pub fn set_value(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "eta_A" => self.eta_a = value,
            "eta_B" => self.eta_b = value,
            "p" => self.p = value,
            "theta" => self.theta = value,
            _ => return Err(field_msg(key, "not a sweepable parameter (eta_A, eta_B, p, theta)".into())),
        }
        Ok(())
    }
}

fn field(name: &str, e: Error) -> Error {
    field_msg(name, e.to_string())
}

fn field_msg(name: &str, message: String) -> Error {
    Error::ConfigField {
        field: name.to_string(),
        message,
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| field_msg(key, format!("cannot parse `{value}` as a number")))
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| field_msg(key, format!("cannot parse `{value}` as a non-negative integer")))
}

/// Parses a number or a multiple of π: `0.39`, `pi`, `pi/8`, `3*pi/8`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(x) = text.parse::<f64>() {
        return Some(x);
    }
    let (numerator, denominator) = match text.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().ok()?),
        None => (text.as_str(), 1.0),
    };
    let factor = match numerator {
        "pi" => 1.0,
        _ => numerator.strip_suffix("*pi")?.parse::<f64>().ok()?,
    };
    Some(factor * PI / denominator)
}

/// Parses `a:b:step` into `a, a + step, …` up to `b` inclusive (within
/// 1e−9 steps). `b < a` gives an empty grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |message: &str| field_msg("grid", format!("`{text}`: {message}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected a:b:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| parse_angle(p).ok_or_else(|| bad("cannot parse bounds")))
        .collect::<Result<_>>()?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0 && step.is_finite() && a.is_finite() && b.is_finite()) {
        return Err(bad("step must be positive and bounds finite"));
    }
    if b < a {
        return Ok(Vec::new());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| a + k as f64 * step).collect())
}

/// Parses config text. A `preset` key supplies the base values and every
/// other key overrides it regardless of order. Without a preset, `eta_A`,
/// `eta_B`, `p` and `theta` are required and `s = 1`, `ω_c = 20`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Config {
                line: line_no,
                message: "empty key".into(),
            });
        }
        if entries.insert(key.to_string(), (line_no, value.to_string())).is_some() {
            return Err(Error::Config {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
    }

    let mut cfg = match entries.remove("preset") {
        Some((line, name)) => RunConfig::preset(Preset::from_name(&name).ok_or_else(|| Error::Config {
            line,
            message: format!("unknown preset `{name}`"),
        })?),
        None => {
            for required in ["eta_A", "eta_B", "p", "theta"] {
                if !entries.contains_key(required) {
                    return Err(field_msg(required, "required when no preset is given".into()));
                }
            }
            let mut base = RunConfig::preset(Preset::Fig1);
            base.label = "custom".into();
            base.out_dir = PathBuf::from("runs").join("custom");
            base
        }
    };
    if let Some((_, label)) = entries.get("label") {
        cfg.out_dir = PathBuf::from("runs").join(label);
    }
    for (key, (_, value)) in &entries {
        cfg.set(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
