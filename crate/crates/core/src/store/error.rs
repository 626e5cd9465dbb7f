use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("ingest error in {source_name}, row {row}: {message}")]
    Ingest { source_name: String, row: usize, column: Option<String>, message: String },

    #[error("registry error: {0}")]
    Registry(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("unknown column `{column}` in table {table}")]
    Bind { table: String, column: String },

    #[error("unknown table `{0}`")]
    UnknownTable(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("invalid table: {0}")]
    Shape(String),
}

impl StoreError {
    pub(crate) fn bind(table: &str, column: &str) -> Self {
        StoreError::Bind { table: table.to_string(), column: column.to_string() }
    }
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;
