use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed algebra: {0}")]
    Malformed(String),

    #[error("operation `{op}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },

    #[error("operation index {0} is not in the signature")]
    UnknownOperation(usize),

    #[error("variable {0} has no assigned value")]
    UnassignedVariable(usize),

    #[error("element {element} is out of range for a universe of size {size}")]
    OutOfRange { element: usize, size: usize },

    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    BudgetExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("partition is not a congruence of `{0}`")]
    NotCongruence(String),

    #[error("universe sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("signatures differ: {0}")]
    SignatureMismatch(String),

    #[error("no Mal'tsev term for `{0}` (search {1})")]
    NoMaltsev(String, &'static str),

    #[error("term catalog for `{0}` was truncated by the budget")]
    Truncated(String),

    #[error("cannot parse term `{input}`: {reason}")]
    TermParse { input: String, reason: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by hitting a configured cap rather than by bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::Truncated(_))
    }
}
