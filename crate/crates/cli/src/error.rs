use std::io;
use std::path::{Path, PathBuf};

/// Failures surfaced by the command line, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad parameters or configuration (exit code 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// An input file that cannot be read or parsed (exit code 3).
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    /// Writing an output failed (exit code 1).
    #[error("write failed: {0}")]
    Output(io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn input(path: impl AsRef<Path>, msg: impl Into<String>) -> Self {
        Self::Input {
            path: path.as_ref().to_path_buf(),
            message: msg.into(),
        }
    }

    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Self::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn output(e: impl Into<io::Error>) -> Self {
        Self::Output(e.into())
    }

    /// Standard output was closed by the reader, as in `workerset ... | head`.
    pub fn is_broken_pipe(&self) -> bool {
        matches!(self, Self::Output(e) if e.kind() == io::ErrorKind::BrokenPipe)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Output(_) => 1,
            Self::Config(_) => 2,
            Self::Input { .. } | Self::Io { .. } => 3,
        }
    }
}

impl From<workerset_core::Error> for CliError {
    fn from(e: workerset_core::Error) -> Self {
        Self::Config(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
