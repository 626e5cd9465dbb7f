//! Agent selection and the HTTP transport for the external-model agent.

use std::sync::Arc;
use std::time::Duration;

use inquest::pipeline::{Agent, DeterministicAgent, IntentRules, LlmAgent, Transport};

/// Endpoint of the external model adapter.
pub const ENDPOINT_ENV: &str = "INQUEST_LLM_ENDPOINT";
/// Optional bearer token sent to that endpoint.
pub const API_KEY_ENV: &str = "INQUEST_LLM_API_KEY";
const TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AgentKind {
    Deterministic,
    Llm,
}

impl AgentKind {
    pub fn parse(name: &str) -> Option<AgentKind> {
        match name {
            "deterministic" => Some(AgentKind::Deterministic),
            "llm" => Some(AgentKind::Llm),
            _ => None,
        }
    }
}

/// POSTs protocol messages as JSON and returns the response body.
pub struct HttpTransport {
    endpoint: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(endpoint: &str, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(TIMEOUT)).build().into();
        HttpTransport { endpoint: endpoint.to_string(), api_key, agent }
    }
}

impl Transport for HttpTransport {
    fn send(&self, body: &str) -> Result<String, String> {
        let mut req = self.agent.post(&self.endpoint).header("content-type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("authorization", format!("Bearer {key}"));
        }
        let mut resp = req.send(body).map_err(|e| format!("{}: {e}", self.endpoint))?;
        resp.body_mut().read_to_string().map_err(|e| format!("{}: {e}", self.endpoint))
    }
}

/// The agent for `kind`. The external agent takes its endpoint from
/// `endpoint` or, failing that, the environment.
pub fn build_agent(kind: AgentKind, endpoint: Option<&str>, rules: Arc<IntentRules>) -> Result<Arc<dyn Agent>, String> {
    match kind {
        AgentKind::Deterministic => Ok(Arc::new(DeterministicAgent::new(rules))),
        AgentKind::Llm => {
            let endpoint = endpoint
                .map(str::to_string)
                .or_else(|| std::env::var(ENDPOINT_ENV).ok())
                .filter(|e| !e.trim().is_empty())
                .ok_or_else(|| format!("the llm agent needs --endpoint or {ENDPOINT_ENV}"))?;
            let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
            Ok(Arc::new(LlmAgent::new(HttpTransport::new(&endpoint, key))))
        }
    }
}
