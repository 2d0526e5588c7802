use thiserror::Error;

/// Failures raised by the numerical routines and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("invalid config `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("field length {got} does not match grid size {expected}")]
    GridMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered at t = {t}")]
    NumericalBlowup { t: f64 },

    #[error("boundary energy fraction {fraction:.3e} exceeds {threshold:.1e} at t = {t}")]
    BoundaryContamination { t: f64, fraction: f64, threshold: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("state is outside the tube: distance {distance:.3e} > {radius:.3e}")]
    OutsideTube { distance: f64, radius: f64 },

    #[error("degenerate denominator {value:.3e} in {what}")]
    Degenerate { what: &'static str, value: f64 },

    #[error("Picard iteration diverged at iteration {iteration}")]
    PicardDivergence { iteration: usize },

    #[error("eigen solver failure: {0}")]
    Eigen(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field, reason: reason.into() }
}

pub(crate) fn config_error(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config { path: path.into(), reason: reason.into() }
}
