use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("{file}: {source}")]
    InFile {
        file: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("bias: {0}")]
    Bias(String),

    #[error("library: {0}")]
    Library(String),

    #[error("task: {0}")]
    Task(String),

    #[error("execution fault: {0}")]
    Fault(String),

    #[error("refused: hypothesis space has {estimate} candidates, ceiling is {ceiling}")]
    Refusal { estimate: u128, ceiling: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn in_file(self, file: impl Into<PathBuf>) -> Error {
        Error::InFile {
            file: file.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
