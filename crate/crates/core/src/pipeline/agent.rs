//! The agent seam: the component that decomposes questions into tasks and
//! phrases results. The deterministic rule-based agent is the default;
//! recording and replay wrappers make conversations reproducible, and the
//! external agent speaks a small JSON protocol over a pluggable transport.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use super::error::{AgentError, PipelineError};
use super::explain::{explain_with_templates, ExplainRequest};
use super::rules::IntentRules;
use super::task::{Task, TaskKind, TaskList};

pub const PROTOCOL_VERSION: u32 = 1;
/// Prefixed to every explanation produced by an external model.
pub const EXTERNAL_ATTRIBUTION: &str = "(external model) ";

pub trait Agent: Send + Sync {
    fn name(&self) -> &str;
    fn map_query(&self, q: &str) -> Result<TaskList, PipelineError>;
    fn explain(&self, req: &ExplainRequest) -> Result<String, AgentError>;
}

/// Rule-table mapping and template explanations.
#[derive(Debug, Clone)]
pub struct DeterministicAgent {
    rules: Arc<IntentRules>,
}

impl DeterministicAgent {
    pub fn new(rules: Arc<IntentRules>) -> Self {
        DeterministicAgent { rules }
    }
}

impl Default for DeterministicAgent {
    fn default() -> Self {
        DeterministicAgent::new(Arc::new(IntentRules::builtin()))
    }
}

/// Each firing rule contributes a data task followed by its query task,
/// in order of where the rule matched in the question.
pub fn map_with_rules(rules: &IntentRules, q: &str) -> Result<TaskList, PipelineError> {
    let unmappable = || PipelineError::UnmappableQuery { q: q.to_string() };
    if q.trim().is_empty() {
        return Err(unmappable());
    }
    let matches = rules.matches(q);
    if matches.is_empty() {
        return Err(unmappable());
    }
    let mut tasks = Vec::new();
    for m in matches {
        let n = tasks.len();
        tasks.push(Task::data(&rules.fill(&m.rule.data_need, q), n + 1));
        tasks.push(Task::query(&rules.fill(&m.rule.query_need, q), n + 2));
    }
    TaskList::new(tasks)
}

impl Agent for DeterministicAgent {
    fn name(&self) -> &str {
        "deterministic"
    }

    fn map_query(&self, q: &str) -> Result<TaskList, PipelineError> {
        map_with_rules(&self.rules, q)
    }

    fn explain(&self, req: &ExplainRequest) -> Result<String, AgentError> {
        Ok(explain_with_templates(req))
    }
}

/// One request/response pair seen by a [`RecordingAgent`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentExchange {
    pub mode: String,
    pub request: Json,
    /// `{"ok": ...}` or `{"error": "..."}`.
    pub response: Json,
}

/// Wraps another agent and logs every exchange.
pub struct RecordingAgent {
    inner: Arc<dyn Agent>,
    log: Mutex<Vec<AgentExchange>>,
}

impl RecordingAgent {
    pub fn new(inner: Arc<dyn Agent>) -> Self {
        RecordingAgent { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn exchanges(&self) -> Vec<AgentExchange> {
        self.log.lock().expect("agent log").clone()
    }

    fn record(&self, mode: &str, request: Json, response: Json) {
        self.log.lock().expect("agent log").push(AgentExchange { mode: mode.into(), request, response });
    }
}

fn outcome<T: Serialize, E: std::fmt::Display>(r: &Result<T, E>) -> Json {
    match r {
        Ok(v) => json!({ "ok": v }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

impl Agent for RecordingAgent {
    fn name(&self) -> &str {
        "recording"
    }

    fn map_query(&self, q: &str) -> Result<TaskList, PipelineError> {
        let r = self.inner.map_query(q);
        self.record("map", json!({ "question": q }), outcome(&r));
        r
    }

    fn explain(&self, req: &ExplainRequest) -> Result<String, AgentError> {
        let r = self.inner.explain(req);
        self.record("explain", serde_json::to_value(req).unwrap_or(Json::Null), outcome(&r));
        r
    }
}

/// Answers from a recorded log: each request is matched to the first
/// unused exchange with the same mode and request.
pub struct ReplayAgent {
    remaining: Mutex<VecDeque<AgentExchange>>,
}

impl ReplayAgent {
    pub fn new(exchanges: Vec<AgentExchange>) -> Self {
        ReplayAgent { remaining: Mutex::new(exchanges.into()) }
    }

    fn take(&self, mode: &str, request: &Json) -> Result<Json, AgentError> {
        let mut q = self.remaining.lock().expect("replay log");
        let pos = q.iter().position(|e| e.mode == mode && &e.request == request).ok_or(AgentError::NoRecording)?;
        let e = q.remove(pos).expect("position is valid");
        match (e.response.get("ok"), e.response.get("error")) {
            (Some(ok), _) => Ok(ok.clone()),
            (None, Some(err)) => Err(AgentError::Transport(err.as_str().unwrap_or("recorded error").to_string())),
            _ => Err(AgentError::Malformed("recorded response has neither ok nor error".into())),
        }
    }
}

impl Agent for ReplayAgent {
    fn name(&self) -> &str {
        "replay"
    }

    fn map_query(&self, q: &str) -> Result<TaskList, PipelineError> {
        let v = self.take("map", &json!({ "question": q }))?;
        serde_json::from_value(v).map_err(|e| PipelineError::Agent(AgentError::Malformed(e.to_string())))
    }

    fn explain(&self, req: &ExplainRequest) -> Result<String, AgentError> {
        let v = self.take("explain", &serde_json::to_value(req).unwrap_or(Json::Null))?;
        v.as_str()
            .map(str::to_string)
            .ok_or_else(|| AgentError::Malformed("recorded explanation is not a string".into()))
    }
}

/// Carries one protocol message to an external model and returns its reply.
pub trait Transport: Send + Sync {
    fn send(&self, body: &str) -> Result<String, String>;
}

/// An external language model behind [`Transport`].
///
/// Requests are `{"protocol":1,"mode":"map"|"explain","payload":...}`;
/// replies are `{"tasks":[{"chi":"Data"|"Query","kappa":"..."}]}` or
/// `{"text":"..."}`. Task lists are validated before use.
pub struct LlmAgent<T: Transport> {
    transport: T,
}

impl<T: Transport> LlmAgent<T> {
    pub fn new(transport: T) -> Self {
        LlmAgent { transport }
    }

    fn call(&self, mode: &str, payload: Json) -> Result<Json, AgentError> {
        let body = json!({ "protocol": PROTOCOL_VERSION, "mode": mode, "payload": payload }).to_string();
        let reply = self.transport.send(&body).map_err(AgentError::Transport)?;
        serde_json::from_str(&reply).map_err(|e| AgentError::Malformed(format!("reply is not JSON: {e}")))
    }
}

#[derive(Deserialize)]
struct WireTask {
    chi: TaskKind,
    kappa: String,
}

impl<T: Transport> Agent for LlmAgent<T> {
    fn name(&self) -> &str {
        "llm"
    }

    fn map_query(&self, q: &str) -> Result<TaskList, PipelineError> {
        if q.trim().is_empty() {
            return Err(PipelineError::UnmappableQuery { q: q.to_string() });
        }
        let reply = self.call("map", json!({ "question": q }))?;
        let tasks: Vec<WireTask> = reply
            .get("tasks")
            .cloned()
            .ok_or_else(|| AgentError::Malformed("reply has no tasks".into()))
            .and_then(|t| serde_json::from_value(t).map_err(|e| AgentError::Malformed(e.to_string())))?;
        TaskList::new(
            tasks.into_iter().enumerate().map(|(i, t)| Task { chi: t.chi, kappa: t.kappa, ordinal: i + 1 }).collect(),
        )
    }

    fn explain(&self, req: &ExplainRequest) -> Result<String, AgentError> {
        let payload = serde_json::to_value(req).map_err(|e| AgentError::Malformed(e.to_string()))?;
        let reply = self.call("explain", payload)?;
        let text = reply
            .get("text")
            .and_then(Json::as_str)
            .ok_or_else(|| AgentError::Malformed("reply has no text".into()))?;
        Ok(format!("{EXTERNAL_ATTRIBUTION}{text}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::rules::Intent;

    const Q1: &str = "How often incidents of rape happen in Bangladesh? Could you generate a monthly trend of rape incidents from available reports?";
    const Q2: &str = "Please show the geographic hot spots rape incidents in the country.";

    fn pairs(t: &TaskList) -> Vec<(TaskKind, String)> {
        t.tasks().iter().map(|t| (t.chi, t.kappa.clone())).collect()
    }

    #[test]
    fn rule_mapping_of_reference_questions() {
        let agent = DeterministicAgent::default();
        assert_eq!(
            pairs(&agent.map_query(Q1).unwrap()),
            [
                (TaskKind::Data, "rape incident reports with dates".into()),
                (TaskKind::Query, "count incidents per month and plot trend".into())
            ]
        );
        assert_eq!(
            pairs(&agent.map_query(Q2).unwrap()),
            [
                (TaskKind::Data, "incident reports with district locations".into()),
                (TaskKind::Query, "count per district and draw hotspot map".into())
            ]
        );
        assert_eq!(agent.map_query("  "), Err(PipelineError::UnmappableQuery { q: "  ".into() }));
        let both = agent.map_query("monthly trend and district hot spots").unwrap();
        assert_eq!(both.len(), 4);
    }

    struct Canned(Result<String, String>);
    impl Transport for Canned {
        fn send(&self, _: &str) -> Result<String, String> {
            self.0.clone()
        }
    }

    fn request() -> ExplainRequest {
        ExplainRequest {
            question: "q".into(),
            need: "n".into(),
            intent: Intent::Lookup,
            grain: None,
            dataset: "D".into(),
            plan: "p".into(),
            tables: vec![],
        }
    }

    #[test]
    fn external_agent_validates_and_attributes() {
        let ok = LlmAgent::new(Canned(Ok(
            r#"{"tasks":[{"chi":"Data","kappa":"reports"},{"chi":"Query","kappa":"count"}]}"#.into(),
        )));
        assert_eq!(ok.map_query("q").unwrap().tasks()[1].ordinal, 2);
        let empty = LlmAgent::new(Canned(Ok(r#"{"tasks":[{"chi":"Data","kappa":""}]}"#.into())));
        assert!(matches!(empty.map_query("q"), Err(PipelineError::Malformed(_))));
        let text = LlmAgent::new(Canned(Ok(r#"{"text":"Dhaka leads."}"#.into())));
        assert_eq!(text.explain(&request()).unwrap(), "(external model) Dhaka leads.");
        let down = LlmAgent::new(Canned(Err("connection refused".into())));
        assert_eq!(down.explain(&request()), Err(AgentError::Transport("connection refused".into())));
    }

    #[test]
    fn recording_replays() {
        let rec = RecordingAgent::new(Arc::new(DeterministicAgent::default()));
        let tasks = rec.map_query(Q1).unwrap();
        let text = rec.explain(&request()).unwrap();
        let replay = ReplayAgent::new(rec.exchanges());
        assert_eq!(replay.map_query(Q1).unwrap(), tasks);
        assert_eq!(replay.explain(&request()).unwrap(), text);
        assert_eq!(replay.explain(&request()), Err(AgentError::NoRecording));
    }
}
