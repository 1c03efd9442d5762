use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The request is valid but too large to run exhaustively.
    #[error("infeasible: {0}")]
    Feasibility(String),

    #[error("resource limit exceeded: elimination width {width} needs {entries} table entries, budget is {budget}")]
    Resource {
        width: usize,
        entries: u128,
        budget: u128,
    },

    #[error(
        "singular denominator for level {k}: state {state} has energy {e_n} against E_k = {e_k}"
    )]
    SingularDenominator {
        k: usize,
        state: String,
        e_k: f64,
        e_n: f64,
    },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
