use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("agent transport error: {0}")]
    Transport(String),
    #[error("agent returned a malformed response: {0}")]
    Malformed(String),
    #[error("no recorded response for this request")]
    NoRecording,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("cannot map the question {q:?} to any known analysis")]
    UnmappableQuery { q: String },

    #[error("no registered dataset matches {kappa:?}; closest: {}", candidates_text(.candidates))]
    NoDatasetMatch { kappa: String, candidates: Vec<(String, f64)> },

    #[error("no datasets are registered")]
    EmptyRegistry,

    #[error("query task {ordinal} ({kappa:?}) has no preceding data task")]
    Ordering { ordinal: usize, kappa: String },

    #[error("{intent} analysis needs {needed} but table {table} has none")]
    SchemaGap { intent: String, table: String, needed: String },

    #[error("invalid task list: {0}")]
    Malformed(String),

    #[error(transparent)]
    Agent(#[from] AgentError),

    #[error("rule file error: {0}")]
    Rules(String),

    #[error("execution error: {0}")]
    Exec(String),

    #[error("chart error: {0}")]
    Viz(String),

    #[error("i/o error: {0}")]
    Io(String),
}

fn candidates_text(c: &[(String, f64)]) -> String {
    if c.is_empty() {
        return "none".into();
    }
    c.iter().map(|(n, s)| format!("{n} ({s:.3})")).collect::<Vec<_>>().join(", ")
}

impl PipelineError {
    /// Short machine-readable name used in turn records.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::UnmappableQuery { .. } => "unmappable_query",
            PipelineError::NoDatasetMatch { .. } => "no_dataset_match",
            PipelineError::EmptyRegistry => "empty_registry",
            PipelineError::Ordering { .. } => "ordering",
            PipelineError::SchemaGap { .. } => "schema_gap",
            PipelineError::Malformed(_) => "malformed_tasks",
            PipelineError::Agent(_) => "agent",
            PipelineError::Rules(_) => "rules",
            PipelineError::Exec(_) => "exec",
            PipelineError::Viz(_) => "viz",
            PipelineError::Io(_) => "io",
        }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;
