use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the estimators, the detector and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("too few points: cloud has {have}, need at least {need}")]
    TooFewPoints { have: usize, need: usize },

    #[error("unstable estimate: {0}")]
    UnstableEstimate(String),

    #[error("degenerate cloud: {0}")]
    DegenerateCloud(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("{path}: bad magic at byte offset {offset}")]
    BadMagic { path: PathBuf, offset: u64 },

    #[error("{path}: bad header at byte offset {offset}: {reason}")]
    BadHeader {
        path: PathBuf,
        offset: u64,
        reason: String,
    },

    #[error("{path}: truncated file at byte offset {offset} (expected {expected} bytes)")]
    TruncatedFile {
        path: PathBuf,
        offset: u64,
        expected: u64,
    },

    #[error("{path}: {extra} trailing bytes after payload at byte offset {offset}")]
    TrailingBytes {
        path: PathBuf,
        offset: u64,
        extra: u64,
    },

    #[error("{path}: non-finite value at byte offset {offset}")]
    NonFiniteValue { path: PathBuf, offset: u64 },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable short name used in report records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Size(_) => "SizeError",
            Error::Param(_) => "ParamError",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::UnstableEstimate(_) => "UnstableEstimate",
            Error::DegenerateCloud(_) => "DegenerateCloud",
            Error::Data(_) => "DataError",
            Error::BadMagic { .. } => "BadMagic",
            Error::BadHeader { .. } => "BadHeader",
            Error::TruncatedFile { .. } => "TruncatedFile",
            Error::TrailingBytes { .. } => "TrailingBytes",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::Parse { .. } => "ParseError",
            Error::Io { .. } => "IoError",
        }
    }

    /// True for failures of a single sample's estimate, as opposed to I/O or
    /// format problems.
    pub fn is_estimator_failure(&self) -> bool {
        matches!(
            self,
            Error::TooFewPoints { .. }
                | Error::UnstableEstimate(_)
                | Error::DegenerateCloud(_)
                | Error::Size(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
