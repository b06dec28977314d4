use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("ParseError at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("ParseError in field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("InvalidProfile in field `{field}`: {message}")]
    InvalidProfile { field: String, message: String },
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error("UnknownCommand: {0}")]
    UnknownCommand(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] taf_core::Error),
}

impl CliError {
    /// 2 for anything the user typed wrong, 1 for failures inside an
    /// operation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) => 1,
            _ => 2,
        }
    }
}
