//! Error type shared across the toolkit.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {msg}")]
    Csv { path: PathBuf, msg: String },

    #[error("schema {path} line {line}: {msg}")]
    SchemaParse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid schema: {0}")]
    SchemaInvalid(String),

    #[error("data row {row}, column {column}: unknown categorical level {value:?}")]
    UnknownLevel {
        row: usize,
        column: String,
        value: String,
    },

    #[error("data row {row}, column {column}: non-numeric value {value:?} in numerical column")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("data row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("column {column:?}: {msg}")]
    ColumnConflict { column: String, msg: String },

    #[error("deletion-empty: {rows} complete rows, {labels} distinct labels")]
    DeletionEmpty { rows: usize, labels: usize },

    #[error("all-missing-column: {}", columns.join(", "))]
    AllMissingColumn { columns: Vec<String> },

    #[error("no-donors: no candidate rows for row {row}, column {column:?}")]
    NoDonors { row: usize, column: String },

    #[error("class-too-small: class {class:?} has {count} rows, need at least {k}")]
    ClassTooSmall {
        class: String,
        count: usize,
        k: usize,
    },

    #[error("degenerate-target: column {0:?} has fewer than two observed classes")]
    DegenerateTarget(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by degenerate data (unusable baseline, empty
    /// donor pools, ...) rather than malformed inputs or API misuse.
    pub fn is_degenerate_data(&self) -> bool {
        matches!(
            self,
            Error::DeletionEmpty { .. }
                | Error::AllMissingColumn { .. }
                | Error::NoDonors { .. }
                | Error::ClassTooSmall { .. }
                | Error::DegenerateTarget(..)
        )
    }
}
