use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ragged input: row {row} has {found} fields, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("attribute {index} out of range (table has {attributes} attributes)")]
    AttributeOutOfRange { index: usize, attributes: usize },

    #[error("entropy of an empty distribution is undefined")]
    EmptyDistribution,

    #[error("removing a record would leave the dataset empty")]
    CannotEmpty,

    #[error("inconsistent frequency model: attribute {attribute} code {code} has zero count")]
    InconsistentModel { attribute: usize, code: u32 },

    #[error("invalid k = {k} for {n} records (need k <= n - 1)")]
    InvalidK { k: usize, n: usize },

    #[error("instance too large: C({n}, {k}) exceeds the budget of {budget} subsets")]
    InstanceTooLarge { n: usize, k: usize, budget: u128 },

    #[error("{0}")]
    Config(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
