use thiserror::Error;

use crate::subset::Subset;

#[derive(Debug, Error)]
pub enum Error {
    /// Out-of-range element, bad parameter value, or a violated precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive routine was asked to enumerate a ground set larger than its guard.
    #[error("ground set of size {n} exceeds the exhaustive limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("minimum-norm point did not converge after {iterations} major cycles (gap {gap:.3e}, best value {best_value})")]
    NotConverged {
        iterations: usize,
        gap: f64,
        best_set: Subset,
        best_value: f64,
    },

    #[error("solver failed: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
