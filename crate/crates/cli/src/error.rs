use serde::Serialize;
use thiserror::Error;

/// Errors reported by the command line, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Inference(String),
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Serialize)]
struct Report<'a> {
    error: &'a str,
    code: i32,
    message: String,
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Inference(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            CliError::Inference(_) => "inference",
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Report { error: self.kind(), code: self.code(), message: self.to_string() })
            .expect("plain strings serialize")
    }
}

impl From<sternet::Error> for CliError {
    fn from(e: sternet::Error) -> Self {
        match e {
            sternet::Error::Spec(m) => CliError::Config(m),
            sternet::Error::Inference(m) => CliError::Inference(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
