use thiserror::Error;

/// Exit status of the binary: 0 success, 1 bad input, 2 negative result or
/// refusal, 3 inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Input = 1,
    Fail = 2,
    Inconclusive = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot parse {what} `{text}`: {message}")]
    Parse {
        what: String,
        text: String,
        message: String,
    },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Config(_) | CliError::Parse { .. } | CliError::Io(_) => Exit::Input,
            CliError::Inconclusive(_) => Exit::Inconclusive,
        }
    }
}
