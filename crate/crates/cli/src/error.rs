use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: `{field}` {reason}")]
    Config { field: String, reason: String },

    #[error("runtime error: {0}")]
    Runtime(String),

    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Runtime(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl From<dcmlab::Error> for CliError {
    fn from(e: dcmlab::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
