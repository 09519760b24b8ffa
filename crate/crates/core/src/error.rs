use thiserror::Error;

/// Errors raised by the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its physical domain.
    #[error("parameter `{name}` = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Two inputs that must describe the same time grid do not.
    #[error("time grids do not match: {0}")]
    GridMismatch(String),

    /// A quadrature, root search or time stepper failed to produce a finite,
    /// converged answer.
    #[error("numerical failure in {stage}: {detail}")]
    Numerical { stage: &'static str, detail: String },

    /// The POVM direction annihilates the steering party's marginal, so the
    /// steered state is undefined.
    #[error("singular measurement: 1 + a.e = {denominator:e}")]
    SingularMeasurement { denominator: f64 },

    /// The master-equation oracle hit a sample where |c(t)| is below the rate
    /// floor.
    #[error("decay rate unavailable at t = {time}; last valid time {last_valid_time}")]
    RateUnavailable { time: f64, last_valid_time: f64 },

    /// A configuration file could not be parsed.
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    /// A configuration field holds an invalid value.
    #[error("config field `{field}`: {message}")]
    ConfigField { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
