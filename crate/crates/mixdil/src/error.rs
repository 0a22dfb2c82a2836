//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not expansive (spectral radius of inverse ≈ {0})")]
    NotExpansive(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("second lattice is not a sublattice of the first")]
    NotSublattice,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown bank name `{0}`")]
    UnknownName(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("period not divisible at level {level}, channel {channel}")]
    PeriodNotDivisible { level: usize, channel: usize },
    #[error("envelope exceeded: {0}")]
    EnvelopeExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mask diagnostic failed: {0}")]
    MaskDiagnosticFailed(String),
    #[error("cascade iteration diverged: {0}")]
    Diverged(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
