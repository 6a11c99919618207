use std::path::PathBuf;

/// Errors produced by the enhancement pipeline and its building blocks.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("expected a {expected}-channel image, got {actual} channels")]
    ChannelMismatch { expected: usize, actual: usize },

    #[error("invalid image buffer: {0}")]
    InvalidBuffer(String),

    #[error("pyramid of {levels} levels is too deep for a {width}x{height} image")]
    PyramidTooDeep {
        levels: usize,
        width: usize,
        height: usize,
    },

    #[error("operation requires a {expected} pyramid")]
    WrongPyramidKind { expected: &'static str },

    #[error("failed to decode {path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("failed to encode {path}: {source}")]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("malformed PFM file: {0}")]
    Pfm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
