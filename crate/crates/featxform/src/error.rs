use std::io;
use std::path::PathBuf;

/// Errors from file handling and the command-line driver.
///
/// Like the core error, the `Display` form starts with a kebab-case kind.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] featxform_core::Error),
    #[error("io-error: {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("format-error: {0}")]
    Format(String),
    #[error("param-error: {0}")]
    Param(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(e) => e.kind(),
            Error::Io { .. } => "io-error",
            Error::Format(_) => "format-error",
            Error::Param(_) => "param-error",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
