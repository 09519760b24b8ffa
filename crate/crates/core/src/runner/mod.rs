//! Configuration, scenario presets, the end-to-end pipeline and its files.

pub mod config;
pub mod output;
pub mod run;

pub use config::{load_config, parse_config, parse_grid, Preset, RunConfig};
pub use run::{run_scenario, simulate, sweep, RunManifest, RunStatus, Scenario, ScenarioReport, Stage, SteeringClass};
