use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A closed-form function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An experiment or algorithm configuration cannot be executed.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The evaluation budget attached to a counter is spent.
    #[error("evaluation budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    /// Population sizing doubled past its ceiling without a passing trial.
    #[error("no feasible population size up to {ceiling}")]
    Infeasible { ceiling: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed document: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
