//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by state construction, linear algebra, and the
/// broadcasting pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix shape {rows}x{cols} does not hold {len} entries")]
    BadShape { rows: usize, cols: usize, len: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("state norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),

    #[error("amplitude vector of length {len} does not match dims {dims:?}")]
    BadAmplitudeCount { dims: Vec<usize>, len: usize },

    #[error("subsystem dimensions must all be positive, got {0:?}")]
    BadDims(Vec<usize>),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),

    #[error("subsystem index {index} invalid for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("subsystem keep list must be strictly increasing, got {0:?}")]
    KeepNotIncreasing(Vec<usize>),

    #[error("operation requires a two-qubit operator, got dims {0:?}")]
    NotTwoQubits(Vec<usize>),

    #[error("copier target must be a qubit subsystem, got dimension {0}")]
    TargetNotQubit(usize),

    #[error("invalid copier spec: {0}")]
    InvalidSpec(String),

    #[error("copier spec parse error at line {line}: {msg}")]
    SpecParse { line: usize, msg: String },

    #[error("mixture weights must be nonnegative and sum to 1 (sum = {0})")]
    BadWeights(f64),

    #[error("quality report needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("window scan found {0} sign changes in [0, 1/2], expected at most one")]
    MultipleSignChanges(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
