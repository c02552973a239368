use thiserror::Error;

/// Errors surfaced by the library. Numerical contract violations (shape
/// mismatches, non-finite values, singular matrices) are reported here
/// rather than panicking so the CLI can exit with a one-line message.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch at {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: String,
        expected: String,
        got: String,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("{op}: {msg}")]
    InvalidInput { op: String, msg: String },

    #[error("singular matrix in {0}")]
    Singular(String),

    #[error("chain diverged (non-finite state) at step {step}")]
    Diverged { step: usize },

    #[error("training aborted: non-finite loss at {context} {index}")]
    TrainingDiverged { context: String, index: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("{file}: {msg}")]
    FileFormat { file: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn shape(context: impl Into<String>, expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            context: context.into(),
            expected: expected.into(),
            got: got.into(),
        }
    }

    pub fn invalid(op: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::InvalidInput {
            op: op.into(),
            msg: msg.into(),
        }
    }
}
