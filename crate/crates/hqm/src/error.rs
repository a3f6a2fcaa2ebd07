//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by simulator components.
///
/// Numerical-contract violations (dimension mismatches, non-physical
/// parameters, step sizes too coarse for the fastest frequency present)
/// are reported through this type rather than by panicking, so callers —
/// the CLI in particular — can print a message and exit cleanly.
#[derive(Debug, Error)]
pub enum HqmError {
    /// Matrix or vector dimensions are incompatible with the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter is outside its physically meaningful range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative routine failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The integrator step size cannot resolve the fastest dynamics present.
    #[error("step size too coarse: {0}")]
    StepSize(String),

    /// Config file syntax or content error.
    #[error("config error: {0}")]
    Config(String),

    /// I/O error wrapper.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, HqmError>;
