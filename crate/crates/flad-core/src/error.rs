//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("label {label} out of range for {classes} classes")]
    InvalidLabel { label: usize, classes: usize },

    #[error("empty data passed to {0}")]
    EmptyData(&'static str),

    #[error("IDX parse error in {path}: {kind}")]
    IdxParse { path: String, kind: IdxErrorKind },

    #[error("image/label count mismatch: {images} images vs {labels} labels")]
    IdxCountMismatch { images: usize, labels: usize },

    #[error("invalid value for `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("cannot partition {samples} samples across {clients} clients")]
    InfeasiblePartition { samples: usize, clients: usize },

    #[error("insufficient data for {context}: need {needed}, have {available}")]
    InsufficientData {
        context: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("ROC undefined: need at least one positive and one negative label")]
    UndefinedRoc,

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    #[error("unsupported loss/head pairing: {0}")]
    UnsupportedLoss(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(String),
}

/// What went wrong while decoding an IDX file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdxErrorKind {
    BadMagic { expected: u32, found: u32 },
    Truncated { field: &'static str },
    BadDimension { field: &'static str, value: usize },
}

impl std::fmt::Display for IdxErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IdxErrorKind::BadMagic { expected, found } => {
                write!(f, "bad magic number: expected {expected:#010x}, found {found:#010x}")
            }
            IdxErrorKind::Truncated { field } => write!(f, "truncated while reading {field}"),
            IdxErrorKind::BadDimension { field, value } => {
                write!(f, "invalid dimension {field} = {value}")
            }
        }
    }
}

impl Error {
    pub(crate) fn shape(context: &'static str, expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            context,
            expected: expected.into(),
            got: got.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }
}
