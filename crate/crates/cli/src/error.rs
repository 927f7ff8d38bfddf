use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mqmeta::Error),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl From<mqmeta::DataError> for CliError {
    fn from(e: mqmeta::DataError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<mqmeta::StatsError> for CliError {
    fn from(e: mqmeta::StatsError) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// 2 for bad input (data, config, usage), 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(mqmeta::Error::Data(_))
            | CliError::Config { .. }
            | CliError::Usage(_) => 2,
            CliError::Core(mqmeta::Error::InvalidArgument(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
