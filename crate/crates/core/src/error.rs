use std::path::PathBuf;

/// Errors produced by ingestion, detectors, frameworks and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("file {0} is empty")]
    EmptyFile(PathBuf),
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("row {row}, column {column}: `{value}` is not a finite number")]
    NotNumeric {
        row: u64,
        column: String,
        value: String,
    },
    #[error("row {row}, column {column}: missing value")]
    MissingValue { row: u64, column: String },
    #[error("row {row}: label `{value}` is not one of 0, 1, true, false")]
    BadLabel { row: u64, value: String },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{column}` has {found} values, expected {expected}")]
    ColumnLength {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("dataset has no numeric columns")]
    NoNumericColumns,
    #[error("dataset has no categorical columns")]
    NoCategoricalColumns,
    #[error("dataset has no cases")]
    EmptyDataset,
    #[error("non-finite score at case {0}")]
    NonFiniteScore(usize),
    #[error("unknown case id {0}")]
    UnknownCase(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("labels contain a single class")]
    SingleClass,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
