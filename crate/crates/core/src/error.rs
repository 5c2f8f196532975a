use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented constraint.
    #[error("invalid parameter {name}: {constraint}")]
    Parameter { name: String, constraint: String },

    /// Division by a quantity that is zero (e.g. total diode current).
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// The parameter combination yields a non-physical circuit model.
    #[error("model validity: {0}")]
    ModelValidity(String),

    /// A -3 dB crossing was not found inside the sampled range.
    #[error("no -3 dB crossing found on the {0} side of the passband")]
    Bounds(&'static str),

    /// A transfer function has poles in the right half-plane (or on the axis).
    #[error("unstable transfer function, poles: {poles:?}")]
    Unstable { poles: Vec<(f64, f64)> },

    /// The record is too short for the requested analysis.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Too few beats to build a usable template.
    #[error("template quality: {0}")]
    TemplateQuality(String),

    /// A metric whose denominator is zero.
    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),

    /// A quantity that cannot be computed with the given inputs.
    #[error("definition error: {0}")]
    Definition(String),

    /// Malformed on-disk data.
    #[error("format error: {0}")]
    Format(#[from] FormatError),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Binary record and code-range errors.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic bytes {found:?}, expected {expected:?}")]
    BadMagic { found: [u8; 4], expected: [u8; 4] },

    #[error("unsupported format version {found} (supported: {supported})")]
    UnsupportedVersion { found: u16, supported: u16 },

    #[error("truncated record: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("trailing data: expected {expected} bytes, found {actual}")]
    TrailingData { expected: usize, actual: usize },

    #[error("code {code} outside the {bits}-bit range")]
    CodeOutOfRange { code: i32, bits: u8 },

    #[error("invalid header field {field}: {reason}")]
    Header { field: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
