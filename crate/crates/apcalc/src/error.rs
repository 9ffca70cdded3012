use thiserror::Error;

/// Failures that stop a command before it can report. All map to exit code 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),

    #[error("{file}: at {pointer}: {msg}")]
    Schema { file: String, pointer: String, msg: String },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] apcalc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        3
    }
}

pub type CliResult<T> = Result<T, CliError>;
