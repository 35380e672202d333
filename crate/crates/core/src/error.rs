use thiserror::Error;

/// Errors raised across the scattering toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate mode: {0}")]
    DegenerateMode(String),

    #[error("index out of range: {index} (valid range 0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("least-squares system is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("boundary fit did not converge: relative residual {residual:.3e} exceeds {tolerance:.3e}")]
    NonConvergence { residual: f64, tolerance: f64 },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("inversion aborted at stage {stage}: {reason}")]
    Aborted { stage: usize, reason: String, partial: Box<crate::inverse::InversionState> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
