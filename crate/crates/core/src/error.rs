use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Malformed DSL string, parameter or configuration value.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("index {k} out of range: sequence has {len} terms")]
    OutOfRange { k: u64, len: u64 },

    /// A value that exact arithmetic cannot represent (irrational power, etc).
    #[error("exact mode cannot represent {0}")]
    Mode(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(
        "index budget of {budget} exhausted while building block {block} \
         ({completed} blocks complete); last prefix sum {last_sum}"
    )]
    Budget {
        budget: u64,
        block: u32,
        completed: usize,
        last_sum: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
