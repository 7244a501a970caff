use thiserror::Error;

use crate::stepper::Trajectory;

pub type Result<T, E = MuskatError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MuskatError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at node {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("coefficient vector has length {got}, grid expects {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("coefficients are not conjugate-symmetric at mode {mode} (defect {defect:e})")]
    NotConjugateSymmetric { mode: i64, defect: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("operator order {0} outside the admissible range")]
    InvalidOrder(f64),

    #[error("stencil offset must be nonzero")]
    ZeroOffset,

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("alpha quadrature produced a non-finite value at node {node} (x = {x}, alpha = {alpha})")]
    QuadratureNonFinite { node: usize, x: f64, alpha: f64 },

    #[error("step diverged after t = {last_valid_time}: {reason}")]
    StepDiverged {
        last_valid_time: f64,
        reason: String,
        partial: Box<Trajectory>,
    },

    #[error("trajectory has no dissipation data")]
    MissingDissipation,

    #[error("{0}")]
    Diagnostic(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MuskatError {
    pub fn param(name: &'static str, message: impl Into<String>) -> Self {
        MuskatError::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        MuskatError::Config {
            location: location.into(),
            message: message.into(),
        }
    }
}
