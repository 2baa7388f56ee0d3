use alloc::string::String;
use core::fmt;

/// Errors produced by the algorithmic core.
///
/// The `Display` form always starts with a stable kebab-case kind
/// (`param-error`, `format-error`, ...) so that command-line drivers and
/// scripts can match on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Param(String),
    DegenerateInput(String),
    Data(String),
    Format(String),
    CorruptPayload(String),
    LevelMismatch { expected: u32, found: u32 },
    Size(String),
    EdgeMismatch,
    EmptyHistogram,
    TooFewLevels(u32),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Param(_) => "param-error",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::Data(_) => "data-error",
            Error::Format(_) => "format-error",
            Error::CorruptPayload(_) => "corrupt-payload",
            Error::LevelMismatch { .. } => "level-mismatch",
            Error::Size(_) => "size-error",
            Error::EdgeMismatch => "edge-mismatch",
            Error::EmptyHistogram => "empty-histogram",
            Error::TooFewLevels(_) => "too-few-levels",
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::CorruptPayload(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = self.kind();
        match self {
            Error::Param(m)
            | Error::DegenerateInput(m)
            | Error::Data(m)
            | Error::Format(m)
            | Error::CorruptPayload(m)
            | Error::Size(m) => write!(f, "{kind}: {m}"),
            Error::LevelMismatch { expected, found } => {
                write!(f, "{kind}: expected {expected} levels, found {found}")
            }
            Error::EdgeMismatch => write!(f, "{kind}: histograms do not share bin edges"),
            Error::EmptyHistogram => write!(f, "{kind}: histogram has no counts"),
            Error::TooFewLevels(l) => write!(f, "{kind}: need at least 3 levels, got {l}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
