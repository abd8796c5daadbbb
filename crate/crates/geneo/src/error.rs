//! Crate-wide error type.

use thiserror::Error;

use crate::operator::EquivarianceWitness;

/// Errors produced by the algebra, decomposition and experiment pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("group too large: closure exceeded {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("degree {degree} too large for {op} (maximum {max})")]
    DegreeTooLarge {
        op: &'static str,
        degree: usize,
        max: usize,
    },

    #[error("group does not act transitively on the domain")]
    NotTransitive,

    #[error("operator is not equivariant: {0}")]
    NotEquivariant(EquivarianceWitness),

    #[error("matrix is not line-constant: {line} {index} sums to {sum}, expected {expected}")]
    LineSumViolation {
        line: &'static str,
        index: usize,
        sum: f64,
        expected: f64,
    },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("no perfect matching in support graph; Hall-violating rows {rows:?}")]
    NoPerfectMatching { rows: Vec<usize> },

    #[error("power iteration did not converge for component {component} after {iterations} iterations")]
    NonConvergence { component: usize, iterations: usize },

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
