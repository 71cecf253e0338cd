use thiserror::Error;

/// Errors produced anywhere in the model pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state {0} is not in the basis")]
    NotFound(String),

    #[error("dimension {dim} exceeds the dense ceiling {ceiling}; use eigensolve_lowest")]
    Capacity { dim: usize, ceiling: usize },

    #[error("no convergence after {iterations} iterations (best residual {best_residual:.3e})")]
    Convergence { iterations: usize, best_residual: f64 },

    #[error("canonical coordinates are singular: {0}")]
    SingularCoordinates(String),

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("phase jump {jump:.3} rad in a single step at t = {t}; reduce the step size")]
    StepSize { t: f64, jump: f64 },

    #[error("minimum lies on the bracket edge at z = {z}; widen the bracket")]
    Bracket { z: f64 },

    #[error("invalid data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
