//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    // The io::Error is the `source`, not part of the message, so chain
    // printers (`{:#}` in anyhow, error reporters) show it exactly once.
    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line of an input file that could not be parsed (bad TSV/JSON shape,
    /// invalid UTF-8, bad escape, ...). Line numbers are 1-based.
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid token: {0}")]
    InvalidToken(String),

    #[error("unknown label: {0}")]
    UnknownLabel(String),

    #[error("duplicate label: {0}")]
    DuplicateLabel(String),

    /// No vocabulary token matches the input at some byte position, so the
    /// string has no segmentation at all.
    #[error("no token covers byte 0x{byte:02x} at position {pos}")]
    NoCoverage { pos: usize, byte: u8 },

    #[error("distribution has {found} entries but the vocabulary has {expected}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("probabilities sum to {sum} (must be 1 within {tolerance})")]
    NotNormalized { sum: f64, tolerance: f64 },

    /// Structural problems in a serialized model: bad magic, truncation,
    /// checksum mismatch, or garbage where a field should be.
    #[error("model file corrupt: {0}")]
    ModelFormat(String),

    #[error("model format version {found} is not supported (this build reads version {supported})")]
    ModelVersion { found: u32, supported: u32 },
}
