use thiserror::Error;
use timo_pigp::Error as CoreError;

/// Process exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitCode {
    Success = 0,
    Config = 2,
    Data = 3,
    Numerical = 4,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::Config,
            CliError::Data(_) | CliError::Io { .. } => ExitCode::Data,
            CliError::Numerical(_) => ExitCode::Numerical,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Domain(_) | CoreError::Argument(_) | CoreError::EnumerationGuard { .. } => {
                CliError::Config(msg)
            }
            CoreError::Parse { .. } | CoreError::Csv(_) | CoreError::Io(_) => CliError::Data(msg),
            CoreError::IllConditioned { .. } | CoreError::StuckChain { .. } => {
                CliError::Numerical(msg)
            }
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
