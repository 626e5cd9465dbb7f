//! The conversational pipeline: a question becomes an ordered task list
//! (data and query tasks), data tasks bind registered tables, query tasks
//! become executable plans, and results are explained in prose.

mod agent;
mod error;
mod explain;
mod plan;
mod resolve;
mod rules;
mod session;
mod task;
pub mod text;
mod transcript;
mod translate;

pub use agent::{
    map_with_rules, Agent, AgentExchange, DeterministicAgent, LlmAgent, RecordingAgent, ReplayAgent, Transport,
    EXTERNAL_ATTRIBUTION, PROTOCOL_VERSION,
};
pub use error::{AgentError, PipelineError, Result};
pub use explain::{explain_with_templates, ColumnDoc, ExplainRequest, TableDoc, MAX_DOC_ROWS, NO_RECORDS};
pub use plan::{PlanKind, QueryPlan, VizDirective};
pub use resolve::{resolve_data, similarity_scores, Binding, Candidate, MIN_SCORE, REPORTED_CANDIDATES};
pub use rules::{Grain, Intent, IntentRules, Rule, RULES_VERSION};
pub use session::{
    Artifact, ChatTurn, Outcome, PlanExplanation, PlanResult, Session, SessionConfig, Timing, TurnError, DEFAULT_SEED,
};
pub use task::{Task, TaskKind, TaskList};
pub use transcript::{render_json, render_text};
pub use translate::translate;
