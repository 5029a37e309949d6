use std::path::PathBuf;

use crate::config::ConfigIssue;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input file not found: {}", .0.display())]
    MissingInput(PathBuf),
    #[error("invalid configuration:\n  {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n  "))]
    Config(Vec<ConfigIssue>),
    #[error("a seed is required for {0}; pass --seed or set `seed` in the configuration")]
    MissingSeed(&'static str),
    #[error(transparent)]
    Core(#[from] kpisentinel::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Data(String),
}

impl CliError {
    /// 2 for unusable invocations (missing input, bad configuration), 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput(_) | CliError::Config(_) | CliError::MissingSeed(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
