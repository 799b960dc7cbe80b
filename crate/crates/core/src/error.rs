use thiserror::Error;

/// Problems with input data: CSV parsing, schema mismatches, malformed streams.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("io error reading {path}: {message}")]
    Io { path: String, message: String },
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("{message} at row {row}, column `{column}`")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("feature arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("attribute {index} expects a {expected} value")]
    ValueKind { index: usize, expected: &'static str },
    #[error("sequence numbers must strictly increase (got {got} after {previous})")]
    Sequence { previous: u64, got: u64 },
}

/// Invalid configuration of a learner, generator or experiment.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("infeasible bias {bias} at t={t}: positive share {share} cannot support it")]
    InfeasibleBias { t: u64, bias: f64, share: f64 },
}

impl ConfigError {
    pub fn invalid(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.into(),
            message: message.into(),
        }
    }
}

/// The required flip count is undefined because the non-protected
/// conditioning count is zero.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("rate for the non-protected group is undefined (empty conditioning set)")]
pub struct UndefinedRate;

/// Umbrella error for experiment runs.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
