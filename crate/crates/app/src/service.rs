//! The HTTP chat service: JSON endpoints over pipeline sessions.
//!
//! Sessions are independent and run concurrently; messages to one session
//! queue on its lock and are answered in arrival order. Turns run on the
//! blocking pool so long analyses never stall the reactor.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use inquest::pipeline::{render_text, ChatTurn, IntentRules, Session, SessionConfig, DEFAULT_SEED};
use inquest::Registry;
use serde::Deserialize;
use serde_json::{json, Value as JsonValue};
use tokio::sync::Mutex;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::agent::{build_agent, AgentKind};

/// The published description of every endpoint and payload.
pub const OPENAPI: &str = include_str!("../../../docs/openapi.json");
const SAMPLE_ROWS: usize = 5;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// 0 picks a free port.
    pub port: u16,
    pub manifest: PathBuf,
    pub artifact_dir: PathBuf,
    pub model_dir: Option<PathBuf>,
    /// Browser origins allowed to call the service; empty disables CORS.
    pub cors_origins: Vec<String>,
    pub rules: Arc<IntentRules>,
    /// External model endpoint for sessions created with `agent: "llm"`.
    pub endpoint: Option<String>,
}

impl ServiceConfig {
    pub fn new(manifest: impl Into<PathBuf>, artifact_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            port: 0,
            manifest: manifest.into(),
            artifact_dir: artifact_dir.into(),
            model_dir: None,
            cors_origins: Vec::new(),
            rules: Arc::new(IntentRules::builtin()),
            endpoint: None,
        }
    }
}

pub struct AppState {
    config: ServiceConfig,
    /// The loaded registry, or why it could not be loaded.
    registry: Result<Arc<Registry>, String>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    artifacts: RwLock<HashMap<String, (PathBuf, PathBuf)>>,
    next_id: AtomicU64,
}

impl AppState {
    /// Opens the manifest and reads every table up front, so a broken
    /// manifest is reported once instead of on every turn.
    pub fn new(config: ServiceConfig) -> AppState {
        let registry = Registry::open(&config.manifest).map_err(|e| e.to_string()).and_then(|r| {
            for name in r.names() {
                r.table(&name).map_err(|e| e.to_string())?;
            }
            Ok(Arc::new(r))
        });
        AppState {
            config,
            registry,
            sessions: RwLock::default(),
            artifacts: RwLock::default(),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn registry_error(&self) -> Option<&str> {
        self.registry.as_ref().err().map(String::as_str)
    }

    fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.read().expect("session map").get(id).cloned()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let mut app = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/messages", post(post_message))
        .route("/sessions/{id}/history", get(history))
        .route("/datasets", get(datasets))
        .route("/artifacts/{id}", get(artifact))
        .route("/artifacts/{id}/data", get(artifact_data))
        .route("/openapi.json", get(openapi))
        .with_state(state.clone());
    let origins: Vec<HeaderValue> =
        state.config.cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
    if !origins.is_empty() {
        app = app.layer(
            CorsLayer::new()
                .allow_origin(AllowOrigin::list(origins))
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    app
}

/// Binds the configured port and serves in the background.
pub async fn spawn(config: ServiceConfig) -> std::io::Result<(SocketAddr, tokio::task::JoinHandle<()>)> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", config.port)).await?;
    let addr = listener.local_addr()?;
    let app = router(Arc::new(AppState::new(config)));
    let handle = tokio::spawn(async move {
        let _ = axum::serve(listener, app).await;
    });
    Ok((addr, handle))
}

/// Serves on all interfaces until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", config.port)).await?;
    let state = Arc::new(AppState::new(config));
    if let Some(e) = state.registry_error() {
        eprintln!("warning: manifest failed to load: {e}");
    }
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    seed: Option<u64>,
    agent: Option<String>,
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let registry = match &state.registry {
        Ok(r) => r.clone(),
        Err(e) => return error(StatusCode::SERVICE_UNAVAILABLE, format!("manifest failed to load: {e}")),
    };
    let req: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        match serde_json::from_slice(&body) {
            Ok(r) => r,
            Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid body: {e}")),
        }
    };
    let agent_name = req.agent.as_deref().unwrap_or("deterministic");
    let Some(kind) = AgentKind::parse(agent_name) else {
        return error(StatusCode::BAD_REQUEST, format!("unknown agent {agent_name:?}; use deterministic or llm"));
    };
    let agent = match build_agent(kind, state.config.endpoint.as_deref(), state.config.rules.clone()) {
        Ok(a) => a,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let seed = req.seed.unwrap_or(DEFAULT_SEED);
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed));
    let config = SessionConfig {
        seed,
        artifact_dir: state.config.artifact_dir.clone(),
        model_dir: state.config.model_dir.clone(),
        rules: state.config.rules.clone(),
        ..SessionConfig::default()
    };
    let mut session = Session::new(&id, registry, config);
    session.set_agent(agent);
    state.sessions.write().expect("session map").insert(id.clone(), Arc::new(Mutex::new(session)));
    (StatusCode::CREATED, Json(json!({ "session_id": id, "seed": seed, "agent": agent_name }))).into_response()
}

#[derive(Debug, Deserialize)]
struct Message {
    text: String,
}

async fn post_message(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Response {
    let Some(session) = state.session(&id) else {
        return error(StatusCode::NOT_FOUND, format!("no session {id}"));
    };
    let msg: Message = match serde_json::from_slice(&body) {
        Ok(m) => m,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, format!("expected {{\"text\": ...}}: {e}")),
    };
    if msg.text.trim().is_empty() {
        return error(StatusCode::UNPROCESSABLE_ENTITY, "text is empty");
    }
    // the lock queues concurrent posts to this session in arrival order
    let mut guard = session.lock_owned().await;
    let turn = match tokio::task::spawn_blocking(move || guard.run_turn(msg.text.trim())).await {
        Ok(t) => t,
        Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, format!("turn failed: {e}")),
    };
    let doc = turn_document(&state, &turn);
    (StatusCode::OK, Json(doc)).into_response()
}

/// A turn as sent over the wire: artifacts gain a global id and URL.
fn turn_document(state: &AppState, turn: &ChatTurn) -> JsonValue {
    let mut doc = serde_json::to_value(turn).expect("turns serialize");
    let mut index = state.artifacts.write().expect("artifact map");
    if let Some(list) = doc.get_mut("artifacts").and_then(JsonValue::as_array_mut) {
        for (a, art) in list.iter_mut().zip(&turn.artifacts) {
            let id = format!("{}-{}", turn.session_id, art.name);
            index.insert(id.clone(), (art.path.clone(), art.data_path.clone()));
            a["id"] = json!(id);
            a["url"] = json!(format!("/artifacts/{id}"));
            a["data_url"] = json!(format!("/artifacts/{id}/data"));
        }
    }
    doc
}

async fn history(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    let Some(session) = state.session(&id) else {
        return error(StatusCode::NOT_FOUND, format!("no session {id}"));
    };
    let s = session.lock().await;
    let turns: Vec<JsonValue> = s.history().iter().map(|t| turn_document(&state, t)).collect();
    Json(json!({ "session_id": id, "turns": turns, "transcript": render_text(s.history()) })).into_response()
}

async fn datasets(State(state): State<Arc<AppState>>) -> Response {
    let registry = match &state.registry {
        Ok(r) => r,
        Err(e) => return error(StatusCode::SERVICE_UNAVAILABLE, format!("manifest failed to load: {e}")),
    };
    let mut out = Vec::new();
    for d in registry.descriptors() {
        let table = match registry.table(&d.name) {
            Ok(t) => t,
            Err(e) => return error(StatusCode::SERVICE_UNAVAILABLE, e.to_string()),
        };
        let columns: Vec<JsonValue> =
            table.schema().iter().map(|c| json!({ "name": c.name, "kind": c.kind })).collect();
        let sample: Vec<Vec<inquest::Value>> = table.rows().take(SAMPLE_ROWS).collect();
        out.push(json!({
            "name": d.name,
            "description": d.description,
            "rows": table.row_count(),
            "columns": columns,
            "sample": sample,
            "has_geometry": d.geometry.is_some(),
        }));
    }
    Json(json!({ "datasets": out })).into_response()
}

async fn artifact(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    serve_artifact(&state, &id, false).await
}

async fn artifact_data(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    serve_artifact(&state, &id, true).await
}

async fn serve_artifact(state: &AppState, id: &str, data: bool) -> Response {
    let entry = state.artifacts.read().expect("artifact map").get(id).cloned();
    let Some((svg, json_path)) = entry else {
        return error(StatusCode::NOT_FOUND, format!("no artifact {id}"));
    };
    let (path, mime) = if data { (json_path, "application/json") } else { (svg, "image/svg+xml") };
    match tokio::fs::read(&path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, mime)], bytes).into_response(),
        Err(e) => error(StatusCode::NOT_FOUND, format!("artifact {id} is unavailable: {e}")),
    }
}

async fn openapi() -> Response {
    ([(header::CONTENT_TYPE, "application/json")], OPENAPI).into_response()
}
