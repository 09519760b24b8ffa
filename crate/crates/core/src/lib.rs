//! Quantum steering ellipsoids of two qubits decaying into independent
//! structured bosonic reservoirs.
//!
//! The pipeline runs from a reservoir spectral density ([`spectral`]) to the
//! exact excited-state amplitude ([`amplitude`]), the evolved two-qubit state
//! ([`state`], [`dissipative`]), its steering ellipsoids ([`geometry`]) and
//! entanglement and steering witnesses ([`witness`]). [`runner`] ties the
//! stages together and writes CSV outputs.
//!
//! ```
//! use steering_ellipsoids::runner::{simulate, Preset, RunConfig};
//!
//! let mut cfg = RunConfig::preset(Preset::Fig1);
//! cfg.t_max = 10.0;
//! cfg.dt = 0.05;
//! let run = simulate(&cfg).unwrap();
//! assert!(run.bound_a.is_some() && run.bound_b.is_some());
//! ```

pub mod amplitude;
pub mod dissipative;
pub mod error;
pub mod geometry;
pub mod quad;
pub mod runner;
pub mod spectral;
pub mod state;
pub mod witness;

pub use amplitude::{solve_volterra, AmplitudeTrajectory};
pub use error::{Error, Result};
pub use geometry::{ellipsoid_of, Party, SteeringEllipsoid};
pub use spectral::OhmicSpectralDensity;
pub use state::{InitialFamilyParams, PauliForm, TwoQubitDensity};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/environment.md")]
    mod environment {}
    #[doc = include_str!("../../../book/src/amplitude.md")]
    mod amplitude {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/ellipsoids.md")]
    mod ellipsoids {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/running.md")]
    mod running {}
}
