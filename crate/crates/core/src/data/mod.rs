//! Dataset representation, ingestion, encoding, splitting, and synthesis.

mod activations;
mod csv_io;
mod encode;
mod matrix;
mod split;
mod synth;
mod table;

pub use activations::{load_activation_dump, write_activation_dump, ActivationEntry, SplitRole};
pub use csv_io::load_csv;
pub use encode::encode_and_impute;
pub use matrix::{stable_sum, Matrix, Standardizer};
pub use split::{count_split, stratified_split, Split};
pub use synth::{generate_synthetic, parse_synthetic_uri, SyntheticSpec};
pub use table::{ColumnKind, Table};

use std::fmt;
use std::path::PathBuf;

/// Errors raised by dataset construction, ingestion, and splitting.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("label column {0:?} not present in header")]
    MissingLabelColumn(String),
    #[error("no data rows")]
    NoDataRows,
    #[error("row {row}: missing value in label column")]
    MissingLabel { row: usize },
    #[error("column {col} has no non-missing values")]
    EmptyColumn { col: usize },
    #[error("class {class} has a single row; stratified splitting needs two or more")]
    SingletonClass { class: usize },
    #[error("unknown synthetic kind {0:?}")]
    UnknownKind(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("malformed manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },
    #[error("csv: {0}")]
    Csv(#[from] ::csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnKind::Numeric => write!(f, "numeric"),
            ColumnKind::Categorical => write!(f, "categorical"),
        }
    }
}
