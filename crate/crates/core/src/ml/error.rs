use thiserror::Error;

use crate::mql::Span;
use crate::store::StoreError;

#[derive(Debug, Error)]
pub enum MlError {
    #[error("feature error: {0}")]
    Feature(String),

    #[error("{0}")]
    Invalid(String),

    #[error("table {table} has no column `{column}` required by the model")]
    Schema { table: String, column: String },

    #[error("model accuracy {accuracy} is below the required {threshold}")]
    Accuracy { accuracy: f64, threshold: f64 },

    #[error("no stored model named `{0}`")]
    ModelNotFound(String),

    #[error("unknown algorithm `{name}` for {task}; supported: {supported}")]
    UnknownAlgorithm { name: String, task: &'static str, supported: String },

    #[error("model store error: {0}")]
    ModelStore(String),

    #[error(transparent)]
    Store(#[from] StoreError),
}

/// An execution failure tied to the statement that caused it.
#[derive(Debug, Error)]
#[error("{error}")]
pub struct ExecError {
    pub span: Span,
    #[source]
    pub error: MlError,
}

pub type Result<T, E = MlError> = std::result::Result<T, E>;
