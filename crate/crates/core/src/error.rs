use thiserror::Error;

use crate::maut::AdditiveWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A structural or value constraint was violated.
    #[error("validation error: {0}")]
    Validation(String),

    /// A query named a factor outside the distribution's universe.
    #[error("unknown factor `{0}`")]
    UnknownFactor(String),

    /// Conditioning on an event (or factor set) of measure zero.
    #[error("conditioning on a null event: {0}")]
    ConditioningOnNull(String),

    /// The input carries no preference content (all weights zero, constant table).
    #[error("degenerate function: {0}")]
    Degenerate(String),

    /// An exhaustive procedure would exceed its size guard.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("table is not additive independent: {0}")]
    NotAdditive(Box<AdditiveWitness>),

    /// Binary factorization needs utilities that are integer multiples of a quantum.
    #[error("utilities are not quantizable: {0}")]
    NonQuantizable(String),

    /// An internal consistency check failed.
    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
