use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names are stable: the command-line front end prints them verbatim
/// so scripts can match on them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("graph has no edges; average-degree scaling is undefined")]
    EmptyGraph,

    #[error("{path}:{line}: {message}")]
    ParseError {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("conflicting weights for edge ({i}, {j}): {first} vs {second}")]
    AsymmetryConflict {
        i: usize,
        j: usize,
        first: f64,
        second: f64,
    },

    #[error("index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{n} nodes is too many for exact enumeration (limit {limit})")]
    TooLargeForEnumeration { n: usize, limit: usize },

    #[error("lambda must be positive for the divergence objective; use kl_to_model at lambda = 0")]
    LambdaZero,

    #[error("influence denominator vanishes: all local fields are zero")]
    DegenerateDenominator,

    #[error("no training sample produced an interior estimate")]
    NoUsableTrainingFits,

    #[error("replicate {replicate} failed: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::EmptyGraph => "EmptyGraph",
            Error::ParseError { .. } => "ParseError",
            Error::AsymmetryConflict { .. } => "AsymmetryConflict",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::TooLargeForEnumeration { .. } => "TooLargeForEnumeration",
            Error::LambdaZero => "LambdaZero",
            Error::DegenerateDenominator => "DegenerateDenominator",
            Error::NoUsableTrainingFits => "NoUsableTrainingFits",
            Error::Replicate { .. } => "ReplicateFailed",
            Error::Io { .. } => "IoError",
            Error::Json { .. } => "JsonError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
