use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("{path}: unsupported bit depth (only 8-bit channels are supported)")]
    UnsupportedBitDepth { path: PathBuf },

    #[error("side-by-side image width {width} is odd and cannot be split")]
    OddWidth { width: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected {expected} views, found {found}")]
    ViewCountMismatch { expected: usize, found: usize },

    #[error("malformed json: {0}")]
    MalformedJson(String),

    #[error("calibration field missing: {0}")]
    MissingField(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("config syntax error at line {line}: {message}")]
    IniSyntax { line: usize, message: String },

    #[error("config section missing: [{0}]")]
    MissingSection(String),

    #[error("config key missing: {key} in [{section}]")]
    MissingKey { section: String, key: String },

    #[error("conflicting frame sources: {0}")]
    ConflictingSources(String),

    #[error("{path}: not a view map (bad magic)")]
    BadMagic { path: PathBuf },

    #[error("{path}: unsupported view map version {found}")]
    VersionMismatch { path: PathBuf, found: u16 },

    #[error("{path}: truncated view map")]
    TruncatedMap { path: PathBuf },

    #[error("{path}: map entry {index} points outside the quilt")]
    EntryOutOfRange { path: PathBuf, index: usize },

    #[error("blend position {0} outside [0, 1]")]
    BlendOutOfRange(f64),

    #[error("image {width}x{height} too small for matching (block radius {radius})")]
    DegenerateImage { width: u32, height: u32, radius: u32 },

    #[error("frame source is empty: {0}")]
    EmptySource(PathBuf),

    #[error("dual sources differ in length: {left} left frames vs {right} right frames")]
    DualLengthMismatch { left: usize, right: usize },

    #[error("stream aborted after {completed} frames: {source}")]
    StreamAborted {
        completed: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
