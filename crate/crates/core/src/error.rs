//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("state vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("subsystem set must be nonempty")]
    EmptySubsystemSet,

    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("Kraus operators do not satisfy the completeness relation (deviation {deviation:.3e})")]
    IncompleteKraus { deviation: f64 },

    #[error("outcome distribution is empty")]
    EmptyDistribution,

    #[error("outcome probabilities sum to {total}, expected 1")]
    ProbabilityNotNormalized { total: f64 },

    #[error("operation requires a two-qubit state, got subsystem dimensions {dims:?}")]
    NotTwoQubit { dims: Vec<usize> },

    #[error("concurrence {value} outside the valid range for this operation")]
    ConcurrenceOutOfRange { value: f64 },

    #[error("measurement outcome {outcome} out of range for dimension {dim}")]
    OutcomeOutOfRange { outcome: usize, dim: usize },

    #[error("invalid LOCC plan: {0}")]
    InvalidPlan(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
