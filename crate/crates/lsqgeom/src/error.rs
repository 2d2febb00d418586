//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("invalid penalty: {0}")]
    InvalidPenalty(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} is singular or numerically rank deficient")]
    Singular { what: &'static str },

    #[error("rank-deficient active block at path step {step}")]
    RankDeficient { step: usize },

    #[error("dual candidate infeasible: {0}")]
    InfeasibleDual(String),

    #[error("{what} did not converge within the iteration budget")]
    NotConverged { what: &'static str },

    #[error("unbounded set: {0}")]
    Unbounded(String),

    #[error("path has no knots (response orthogonal to every column)")]
    EmptyPath,

    #[error("requested step {k} but the path has only {knots} knots")]
    StepBeyondPath { k: usize, knots: usize },
}
