use thiserror::Error;

use crate::data::ClassId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dataset: {}", .0.join("; "))]
    InvalidDataset(Vec<String>),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("input is not a probability distribution (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("invalid component {value} at index {index}")]
    InvalidComponent { index: usize, value: f64 },

    #[error("training set contains a single class")]
    SingleClass,

    #[error("non-finite feature value in sample {sample}")]
    NonFinite { sample: usize },

    #[error("class id {class} out of range for {num_classes} classes")]
    ClassOutOfRange { class: ClassId, num_classes: usize },

    #[error("{folds} folds requested but the smallest class has {min_class} samples")]
    TooManyFolds { folds: usize, min_class: usize },

    #[error("sample {sample}: dimension {actual} does not match model dimension {expected}")]
    SampleDimension {
        sample: usize,
        expected: usize,
        actual: usize,
    },

    #[error("training pair ({x}, {y}) failed: {source}")]
    Pair {
        x: ClassId,
        y: ClassId,
        #[source]
        source: Box<Error>,
    },

    #[error("model format: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
