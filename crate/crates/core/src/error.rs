use thiserror::Error;

/// Errors raised while reading or aligning annotation and score files.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("input is empty: {0}")]
    EmptyFile(String),

    #[error("missing required column `{column}` in {source_name}")]
    MissingColumn { column: String, source_name: String },

    #[error("line {line}: unknown severity `{token}`")]
    MalformedSeverity { line: usize, token: String },

    #[error("line {line}: empty error category")]
    EmptyCategory { line: usize },

    #[error("duplicate score for system `{system}`, segment `{segment}` in {source_name}")]
    DuplicateCell {
        system: String,
        segment: String,
        source_name: String,
    },

    #[error("line {line}: score `{token}` is not a finite number")]
    NonNumericScore { line: usize, token: String },

    #[error("no score for system `{system}`, segment `{segment}` in `{matrix}`")]
    UnalignedIds {
        matrix: String,
        system: String,
        segment: String,
    },

    #[error("evaluation set needs at least 2 systems and 1 segment, found {systems} x {segments}")]
    TooSmall { systems: usize, segments: usize },

    #[error("matrix shape {found:?} does not match {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("malformed input at line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Errors from the statistics layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("need at least {required} observations, found {found}")]
    InsufficientData { required: usize, found: usize },

    #[error("within-system variation is zero")]
    DegenerateWithin,

    #[error("system {0} has zero variance")]
    ZeroVarianceSystem(usize),

    #[error("argument outside the function domain: {0}")]
    DomainError(String),
}

/// Errors from meta-evaluation and the analysis protocols.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),

    #[error(transparent)]
    Stats(#[from] StatsError),

    #[error("every human system pair is tied")]
    NoUsablePairs,

    #[error("no candidate pairs share the held aspect while differing on the varied one")]
    NoQualifyingPairs,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
