use thiserror::Error;

/// Errors produced by the model, the solvers and the file formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {vertex} is out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("invalid discount function: {0}")]
    InvalidDiscount(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input graph is not a tree: {0}")]
    NotATree(String),

    #[error("{what} of {actual} exceeds the configured limit of {limit}")]
    LimitExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("estimated work {estimate:.3e} exceeds the configured budget of {budget:.3e}")]
    BudgetExceeded { estimate: f64, budget: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the input was well formed but the request cannot be served
    /// (size limits, work budgets, structural preconditions such as tree shape).
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::NotATree(_) | Error::LimitExceeded { .. } | Error::BudgetExceeded { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
