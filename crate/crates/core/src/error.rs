use thiserror::Error;

pub type Result<T> = std::result::Result<T, ApxError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApxError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("query out of range: {0}")]
    Query(String),
}

impl ApxError {
    pub fn input(msg: impl Into<String>) -> Self {
        ApxError::InvalidInput(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        ApxError::Resource(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        ApxError::Contract(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            ApxError::Contract(_) => 1,
            ApxError::InvalidInput(_) | ApxError::Parse { .. } | ApxError::Query(_) => 2,
            ApxError::Resource(_) => 3,
        }
    }
}
