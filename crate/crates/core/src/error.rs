use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by dataset handling, model evaluation and training.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed cell at row {row}, column {col}: {value:?}")]
    MalformedCell { row: usize, col: usize, value: String },

    #[error("label column {0:?} not found in header")]
    MissingLabelColumn(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },

    #[error("file contains no data rows")]
    EmptyFile,

    #[error("row {0} has zero Euclidean norm")]
    ZeroVectorRow(usize),

    #[error("band index {index} out of range for {dims} dimensions")]
    IndexOutOfRange { index: usize, dims: usize },

    #[error("band indices must be strictly increasing")]
    UnorderedIndices,

    #[error("class {0} has too few samples for a stratified split")]
    ClassTooSmall(usize),

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("no prototype shares the sample's class {0}")]
    NoSameClassPrototype(usize),

    #[error("no prototype with a class different from {0}")]
    NoOtherClassPrototype(usize),

    #[error("d⁺ + d⁻ = 0: classifier function gradient undefined")]
    DegenerateDistances,

    #[error("dimension mismatch: n_model={model}, n_data={data}")]
    DimensionMismatch { model: usize, data: usize },

    #[error("all parameters are zero, cannot normalize")]
    AllZeroParameters,

    #[error("non-finite parameter update at step {step} (epoch {epoch}): {detail}")]
    NonFiniteUpdate { epoch: usize, step: usize, detail: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json { path: path.into(), source }
    }
}
