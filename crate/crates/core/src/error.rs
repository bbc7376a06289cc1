//! Error type shared by every solver entry point.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    /// An argument is outside the range the operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// The problem lacks structure the operation needs (e.g. no closed-form
    /// cost tail), so the requested computation cannot be set up.
    #[error("unsupported problem: {0}")]
    Unsupported(String),

    /// A backward sweep produced a non-finite value. `time` and `cell` name
    /// the first offending node.
    #[error("stability failure at t = {time}, cell {cell}: value {value}")]
    Stability { time: f64, cell: usize, value: f64 },

    /// Two fields or tables that must share a lattice do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The inputs break a structural assumption (splice continuity,
    /// cost-envelope bounds, tail form of a two-time cost, ...).
    #[error("structural error: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
