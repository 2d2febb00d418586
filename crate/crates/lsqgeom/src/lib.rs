//! Penalized least squares with support-function penalties, and the
//! convex-geometry quantities that describe how such estimators behave:
//! solution paths, significance tests along them, degrees of freedom and
//! unbiased risk, intrinsic volumes, Gaussian widths, tube volumes, and
//! critical radii of Gaussian processes.

/// Crate version, embedded in machine-readable outputs downstream.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod path;
pub mod projection;
pub mod risk;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    objective_value, polar_gauge, support_function, PenaltyKind, PenaltySpec, RegressionProblem,
    SignConstraint, Solution, SolveStatus,
};
pub use projection::{membership_check, project_scaled, prox_penalty, ProjectionResult, FACE_TOL};
