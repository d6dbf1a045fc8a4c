use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Adaptive quadrature exhausted its refinement budget. The best estimate
    /// is carried along so callers can still report it.
    #[error("quadrature did not converge (value {value:e}, error estimate {err_estimate:e})")]
    NonConvergent { value: f64, err_estimate: f64 },

    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("step control support {support} exceeds the horizon {horizon}")]
    SupportExceedsHorizon { support: f64, horizon: f64 },

    #[error("bang-bang solver did not converge (residual {residual:e})")]
    NoConvergence {
        best: crate::moments::BangBangSolution,
        residual: f64,
    },

    #[error("switching points left the ordered simplex: {0}")]
    InfeasibleOrdering(String),

    #[error("invalid control: {0}")]
    InvalidControl(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
