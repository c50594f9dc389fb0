use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {context}")]
    Numeric { context: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error("unsupported model format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("lower-bound procedure invalid for these parameters; increase M ({0})")]
    LowerBound(String),

    #[error("relative gap undefined: upper bound {0} is not positive (use absolute gap mode)")]
    GapUndefined(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn numeric(context: impl Into<String>) -> Self {
        Error::Numeric {
            context: context.into(),
        }
    }
}
