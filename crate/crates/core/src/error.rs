use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed degree sequence: {0}")]
    MalformedSequence(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("entropy is degenerate: vertex {vertex} has out-degree {out_degree} < 2")]
    DegenerateEntropy { vertex: usize, out_degree: usize },

    #[error("empirical measure is empty")]
    EmptyMeasure,

    #[error("in-degree repair failed after {attempts} attempts")]
    RepairOverflow { attempts: usize },

    #[error("no simple realization found in {tries} tries")]
    SimpleUnreachable { tries: usize },

    #[error("vertex {vertex} has out-degree 0")]
    DanglingVertex { vertex: usize },

    #[error("no convergence after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("tree built to depth {built}, requested {requested}")]
    DepthExceeded { built: usize, requested: usize },

    #[error("exploration exceeded budget of {budget}")]
    BudgetExceeded { budget: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
