use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// [`Error::name`] gives a stable, machine-readable identifier that the CLI
/// prints on stderr.
#[derive(Debug, Error)]
pub enum Error {
    #[error("committee has no voters")]
    EmptyCommittee,
    #[error("dimension must be at least 1")]
    BadDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid feature vector: {0}")]
    InvalidFeature(String),
    #[error("k = {k} is outside the support 0..={n}")]
    BadSupport { n: u64, k: u64 },
    #[error("training stream is empty")]
    EmptyStream,
    #[error("training stream contains no target-domain instances")]
    NoTargetData,
    #[error("bad segment configuration: {0}")]
    BadSegment(String),
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("file {0} is empty")]
    EmptyFile(PathBuf),
    #[error("ragged csv at record {record}: {message}")]
    RaggedCsv { record: u64, message: String },
    #[error("line {line}: cannot parse {token:?} as a finite number")]
    BadNumber { line: u64, token: String },
    #[error("label column has more than two distinct values ({0:?})")]
    NotBinary(Vec<String>),
    #[error("line {line}: feature index {index} outside 1..={dimension}")]
    IndexOutOfRange {
        line: u64,
        index: u64,
        dimension: usize,
    },
    #[error("line {line}: {message}")]
    BadSparseLine { line: u64, message: String },
    #[error("train fraction {0} is not inside (0, 1)")]
    BadFraction(f64),
    #[error("split leaves a label class without training instances")]
    DegenerateSplit,
    #[error("result table is empty")]
    EmptyTable,
    #[error("model file line {line}: {message}")]
    BadModelFile { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("repetition {index}: {source}")]
    Repetition {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable identifier of the variant, e.g. `"DimensionMismatch"`.
    ///
    /// Errors wrapped with a repetition index report the name of the
    /// underlying failure.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyCommittee => "EmptyCommittee",
            Error::BadDimension => "BadDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidFeature(_) => "InvalidFeature",
            Error::BadSupport { .. } => "BadSupport",
            Error::EmptyStream => "EmptyStream",
            Error::NoTargetData => "NoTargetData",
            Error::BadSegment(_) => "BadSegment",
            Error::EmptyTestSet => "EmptyTestSet",
            Error::EmptyFile(_) => "EmptyFile",
            Error::RaggedCsv { .. } => "RaggedCsv",
            Error::BadNumber { .. } => "BadNumber",
            Error::NotBinary(_) => "NotBinary",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::BadSparseLine { .. } => "BadSparseLine",
            Error::BadFraction(_) => "BadFraction",
            Error::DegenerateSplit => "DegenerateSplit",
            Error::EmptyTable => "EmptyTable",
            Error::BadModelFile { .. } => "BadModelFile",
            Error::BadConfig(_) => "BadConfig",
            Error::Repetition { source, .. } => source.name(),
            Error::Io { .. } => "IoError",
            Error::Json(_) => "JsonError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn mismatch(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }
}
