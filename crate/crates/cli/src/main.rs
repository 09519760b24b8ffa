use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use steering_ellipsoids::runner::run::write_spectrum_scan;
use steering_ellipsoids::runner::{load_config, parse_grid, run_scenario, sweep, Preset, RunConfig, RunStatus};
use steering_ellipsoids::spectral::spectrum_scan;

#[derive(Parser)]
#[command(name = "qse", version, about = "Steering ellipsoids of two qubits in structured reservoirs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its files.
    Simulate {
        /// Flat `key = value` config file.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a preset once per value of a parameter grid.
    Sweep {
        /// One of eta_A, eta_B, p, theta.
        #[arg(long)]
        param: String,
        /// `a:b:step`, inclusive; bounds may be multiples of pi.
        #[arg(long)]
        grid: String,
        /// Concurrent runs; 0 uses all cores.
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Bound-state energy and residue over a coupling grid.
    Spectrum {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 20.0)]
        omegac: f64,
        #[arg(long)]
        eta_grid: String,
        /// Output directory for spectrum.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// fig1, fig2a, fig2b, fig3a, fig3b or fig4.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
}

impl Common {
    fn apply(&self, mut cfg: RunConfig) -> Result<RunConfig> {
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(tmax) = self.tmax {
            cfg.t_max = tmax;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn preset(&self) -> Result<RunConfig> {
        let name = self.preset.as_deref().context("--preset is required")?;
        match Preset::from_name(name) {
            Some(p) => Ok(RunConfig::preset(p)),
            None => bail!("unknown preset `{name}`"),
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { config, common } => {
            let base = match &config {
                Some(path) => load_config(path).with_context(|| format!("loading {}", path.display()))?,
                None => common.preset()?,
            };
            let cfg = common.apply(base)?;
            let manifest = run_scenario(&cfg)?;
            println!("wrote {}", cfg.out_dir.join("manifest.txt").display());
            match &manifest.status {
                RunStatus::Complete => {
                    for key in ["bound_state_A", "bound_state_B", "final_semiaxes_A", "final_semiaxes_B", "classification"] {
                        println!("{key} = {}", manifest.get(key).unwrap_or(""));
                    }
                    Ok(true)
                }
                RunStatus::Failed { stage, message } => {
                    eprintln!("run failed in {} stage: {message}", stage.name());
                    Ok(false)
                }
            }
        }
        Command::Sweep {
            param,
            grid,
            workers,
            common,
        } => {
            let mut cfg = common.preset()?;
            cfg.out_dir = PathBuf::from("runs").join(format!("{}_{param}_sweep", cfg.label));
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let cfg = common.apply(cfg)?;
            let points = sweep(&cfg, &param, &parse_grid(&grid)?)?;
            let failed = points
                .iter()
                .filter(|p| !p.outcome.as_ref().is_ok_and(|m| m.is_complete()))
                .count();
            println!("wrote {} ({} points, {failed} failed)", cfg.out_dir.join("summary.csv").display(), points.len());
            Ok(failed == 0)
        }
        Command::Spectrum { s, omegac, eta_grid, out } => {
            let rows = spectrum_scan(s, omegac, &parse_grid(&eta_grid)?)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("spectrum.csv");
            write_spectrum_scan(&path, &rows)?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
