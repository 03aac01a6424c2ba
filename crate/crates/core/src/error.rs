use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the partitioning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("clique budget exceeded: more than {0} maximal cliques")]
    CliqueBudgetExceeded(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("idf undefined: {0}")]
    EmptyColumn(String),

    #[error(
        "distance matrix for {n} points needs {bytes} bytes, over the budget of {budget} bytes; use the k-means path instead"
    )]
    MemoryBudget { n: usize, bytes: usize, budget: usize },

    #[error("k = {k} out of range [{min}, {max}]")]
    KOutOfRange { k: usize, min: usize, max: usize },

    #[error("modularity undefined: graph has no edges")]
    ModularityUndefined,

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps the error with a description of what was being processed.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with all context layers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
