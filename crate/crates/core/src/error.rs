//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by group operations, gain design and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The logarithm was requested too close to the cut locus of the
    /// exponential chart. Exponential coordinates are meaningless there and
    /// callers must not linearize at such points.
    #[error("logarithm near the cut locus: rotation angle {angle} is within {margin:e} of pi")]
    AtCutLocus { angle: f64, margin: f64 },

    /// The generators handed to a basis do not span the algebra.
    #[error("basis generators are linearly dependent: rank {rank} < dimension {dim}")]
    SingularBasis { rank: usize, dim: usize },

    /// Pole placement was requested for a pair (A, C) whose observability
    /// matrix is rank deficient.
    #[error("pair (A, C) not observable: observability rank {rank} < state dimension {dim}")]
    NotObservable { rank: usize, dim: usize },

    /// An integration step produced a non-finite right-hand side.
    #[error("integration step rejected at t = {t}: non-finite right-hand side")]
    StepRejected { t: f64 },

    /// Input samples must be given in strictly increasing time order.
    #[error("input samples not strictly increasing at index {index}")]
    NonMonotonicSamples { index: usize },

    /// Catch-all for dimension mismatches and invalid configuration values.
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
