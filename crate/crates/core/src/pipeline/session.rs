//! Chat sessions: one question in, one fully recorded turn out.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::agent::{Agent, DeterministicAgent};
use super::error::{PipelineError, Result};
use super::explain::{ExplainRequest, TableDoc};
use super::plan::{PlanKind, QueryPlan, VizDirective};
use super::resolve::{resolve_data, Binding};
use super::rules::IntentRules;
use super::task::{Task, TaskKind};
use super::translate::translate;
use crate::ml::{execute_mql, ExecContext, Execution, MlResult, ModelStore};
use crate::mql::parse_statement;
use crate::store::{run_aggregation, Registry, Table};
use crate::viz::{
    render_bar, render_choropleth, render_cluster_scatter, render_trend, Chart, ChartOptions, RegionGeometry, Series,
    DEFAULT_BINS,
};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub seed: u64,
    /// Charts go to `<artifact_dir>/<session id>/`.
    pub artifact_dir: PathBuf,
    /// Where CONSTRUCT statements store models; none disables them.
    pub model_dir: Option<PathBuf>,
    pub bins: usize,
    pub rules: Arc<IntentRules>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            seed: DEFAULT_SEED,
            artifact_dir: PathBuf::from("artifacts"),
            model_dir: None,
            bins: DEFAULT_BINS,
            rules: Arc::new(IntentRules::builtin()),
        }
    }
}

/// A chart written to disk with its JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifact {
    /// Unique within the session, e.g. `turn-1-plan-1-trend`.
    pub name: String,
    pub kind: String,
    pub plan_index: usize,
    pub ordinal: usize,
    pub file: String,
    pub data_file: String,
    #[serde(skip)]
    pub path: PathBuf,
    #[serde(skip)]
    pub data_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Ok { tables: Vec<TableDoc> },
    Chart { artifact: String },
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanResult {
    pub plan_index: usize,
    pub ordinal: usize,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanExplanation {
    pub plan_index: usize,
    pub text: String,
}

/// Why a turn stopped early.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurnError {
    /// `map`, `resolve` or `translate`.
    pub stage: String,
    pub code: String,
    pub message: String,
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub map_ms: f64,
    pub bind_ms: f64,
    pub execute_ms: f64,
    pub explain_ms: f64,
    pub total_ms: f64,
}

/// Everything that happened for one question.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatTurn {
    pub session_id: String,
    /// 1-based within the session.
    pub index: usize,
    pub query: String,
    pub agent: String,
    pub tasks: Vec<Task>,
    pub bindings: Vec<Binding>,
    pub plans: Vec<QueryPlan>,
    pub results: Vec<PlanResult>,
    pub artifacts: Vec<Artifact>,
    pub explanations: Vec<PlanExplanation>,
    pub explanation: String,
    pub error: Option<TurnError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ChatTurn {
    /// The turn minus wall-clock timings, for reproducible comparison.
    pub fn without_timing(&self) -> ChatTurn {
        ChatTurn { timing: None, ..self.clone() }
    }

    pub fn tables(&self) -> impl Iterator<Item = &TableDoc> {
        self.results.iter().flat_map(|r| match &r.outcome {
            Outcome::Ok { tables } => tables.as_slice(),
            _ => &[],
        })
    }
}

/// What a plan produced, kept for later plans in the same turn.
enum Produced {
    Table(Table),
    Ml(Box<MlResult>),
    Chart,
    Failed,
}

pub struct Session {
    id: String,
    config: SessionConfig,
    registry: Arc<Registry>,
    agent: Arc<dyn Agent>,
    turns: Vec<ChatTurn>,
    geometry: HashMap<PathBuf, Arc<RegionGeometry>>,
}

impl Session {
    pub fn new(id: &str, registry: Arc<Registry>, config: SessionConfig) -> Session {
        let agent: Arc<dyn Agent> = Arc::new(DeterministicAgent::new(config.rules.clone()));
        Session { id: id.to_string(), config, registry, agent, turns: Vec::new(), geometry: HashMap::new() }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn agent_name(&self) -> &str {
        self.agent.name()
    }

    pub fn set_agent(&mut self, agent: Arc<dyn Agent>) {
        self.agent = agent;
    }

    pub fn history(&self) -> &[ChatTurn] {
        &self.turns
    }

    pub fn artifact_dir(&self) -> PathBuf {
        self.config.artifact_dir.join(&self.id)
    }

    /// Maps, binds, translates, executes and explains one question. Stage
    /// failures are recorded in the returned turn; the session carries on.
    pub fn run_turn(&mut self, q: &str) -> ChatTurn {
        let started = Instant::now();
        let mut turn = ChatTurn {
            session_id: self.id.clone(),
            index: self.turns.len() + 1,
            query: q.to_string(),
            agent: self.agent.name().to_string(),
            tasks: Vec::new(),
            bindings: Vec::new(),
            plans: Vec::new(),
            results: Vec::new(),
            artifacts: Vec::new(),
            explanations: Vec::new(),
            explanation: String::new(),
            error: None,
            timing: None,
        };
        let mut timing = Timing { map_ms: 0.0, bind_ms: 0.0, execute_ms: 0.0, explain_ms: 0.0, total_ms: 0.0 };

        let t = Instant::now();
        let mapped = self.agent.map_query(q);
        timing.map_ms = ms(t);
        match mapped {
            Err(e) => fail(&mut turn, "map", &e),
            Ok(tasks) => {
                turn.tasks = tasks.tasks().to_vec();
                let t = Instant::now();
                let bound = self.bind(&mut turn);
                timing.bind_ms = ms(t);
                match bound {
                    Err((stage, e)) => fail(&mut turn, stage, &e),
                    Ok(()) => {
                        let t = Instant::now();
                        let produced = self.execute(&mut turn);
                        timing.execute_ms = ms(t);
                        let t = Instant::now();
                        self.explain(&mut turn, &produced);
                        timing.explain_ms = ms(t);
                    }
                }
            }
        }
        timing.total_ms = ms(started);
        turn.timing = Some(timing);
        self.turns.push(turn.clone());
        turn
    }

    /// Data tasks bind; query tasks translate against the latest binding
    /// made earlier in this turn.
    fn bind(&self, turn: &mut ChatTurn) -> std::result::Result<(), (&'static str, PipelineError)> {
        let mut current: Option<Binding> = None;
        for task in turn.tasks.clone() {
            match task.chi {
                TaskKind::Data => {
                    let b = resolve_data(&task.kappa, task.ordinal, &self.registry).map_err(|e| ("resolve", e))?;
                    turn.bindings.push(b.clone());
                    current = Some(b);
                }
                TaskKind::Query => {
                    let plans =
                        translate(&task, current.as_ref(), &self.registry, &self.config.rules, turn.plans.len())
                            .map_err(|e| ("translate", e))?;
                    turn.plans.extend(plans);
                }
            }
        }
        Ok(())
    }

    fn execute(&mut self, turn: &mut ChatTurn) -> Vec<Produced> {
        let mut produced: Vec<Produced> = Vec::with_capacity(turn.plans.len());
        for (i, plan) in turn.plans.clone().iter().enumerate() {
            let (outcome, out) = match self.execute_plan(turn, i, plan, &produced) {
                Ok((outcome, out)) => (outcome, out),
                Err(e) => (Outcome::Error { message: e.to_string() }, Produced::Failed),
            };
            turn.results.push(PlanResult { plan_index: i, ordinal: plan.ordinal, outcome });
            produced.push(out);
        }
        produced
    }

    fn execute_plan(
        &mut self,
        turn: &mut ChatTurn,
        index: usize,
        plan: &QueryPlan,
        earlier: &[Produced],
    ) -> Result<(Outcome, Produced)> {
        match &plan.kind {
            PlanKind::Agg { plan: agg } => {
                let table = run_aggregation(agg, &self.registry).map_err(|e| PipelineError::Exec(e.to_string()))?;
                Ok((Outcome::Ok { tables: vec![TableDoc::from_table(&table)] }, Produced::Table(table)))
            }
            PlanKind::Mql { statement } => {
                let stmt = parse_statement(statement).map_err(|e| PipelineError::Exec(e.to_string()))?;
                let store = self.config.model_dir.as_ref().map(ModelStore::new);
                let mut ctx = ExecContext::new(&self.registry).with_seed(self.config.seed);
                if let Some(s) = &store {
                    ctx = ctx.with_models(s);
                }
                match execute_mql(&stmt, &ctx).map_err(|e| PipelineError::Exec(e.to_string()))? {
                    Execution::Ml(r) => {
                        let tables = vec![TableDoc::from_table(&r.table), TableDoc::from_table(&r.summary)];
                        Ok((Outcome::Ok { tables }, Produced::Ml(Box::new(r))))
                    }
                    other => {
                        let t = other.primary_table();
                        Ok((Outcome::Ok { tables: vec![TableDoc::from_table(&t)] }, Produced::Table(t)))
                    }
                }
            }
            PlanKind::Viz { directive, input, title } => {
                let source = earlier
                    .get(*input)
                    .ok_or_else(|| PipelineError::Viz(format!("plan {input} does not precede this chart")))?;
                let chart = self.render(plan, directive, title, source)?;
                let artifact = self.write_artifact(turn.index, index, plan.ordinal, &chart)?;
                let name = artifact.name.clone();
                turn.artifacts.push(artifact);
                Ok((Outcome::Chart { artifact: name }, Produced::Chart))
            }
        }
    }

    fn render(&mut self, plan: &QueryPlan, directive: &VizDirective, title: &str, source: &Produced) -> Result<Chart> {
        let viz = |e: crate::viz::VizError| PipelineError::Viz(e.to_string());
        let table = match source {
            Produced::Table(t) => Some(t),
            Produced::Ml(r) => Some(&r.table),
            Produced::Chart => None,
            Produced::Failed => return Err(PipelineError::Viz("the input step failed".into())),
        };
        let table = table.ok_or_else(|| PipelineError::Viz("a chart cannot draw another chart".into()))?;
        match directive {
            VizDirective::TrendLine { key, measure, .. } => render_trend(
                &Series::from_table(table, key, measure).map_err(viz)?,
                &ChartOptions::titled(title).axes(key, measure),
            )
            .map_err(viz),
            VizDirective::BarChart { key, measure } => render_bar(
                &Series::from_table(table, key, measure).map_err(viz)?,
                &ChartOptions::titled(title).axes(key, measure),
            )
            .map_err(viz),
            VizDirective::Choropleth { region_column, measure } => {
                let dataset = plan.tables.first().ok_or_else(|| PipelineError::Viz("chart has no dataset".into()))?;
                let geometry = self.geometry_for(dataset)?;
                let series = Series::from_table(table, region_column, measure).map_err(viz)?;
                render_choropleth(
                    &series,
                    &geometry,
                    self.config.bins,
                    &ChartOptions::titled(title).axes(region_column, measure),
                )
                .map_err(viz)
            }
            VizDirective::ClusterScatter => match source {
                Produced::Ml(r) => {
                    let clustering = r
                        .clustering
                        .as_ref()
                        .ok_or_else(|| PipelineError::Viz("the input step did not cluster".into()))?;
                    render_cluster_scatter(clustering, &r.features, &ChartOptions::titled(title)).map_err(viz)
                }
                _ => Err(PipelineError::Viz("a cluster scatter needs a clustering step".into())),
            },
        }
    }

    fn geometry_for(&mut self, dataset: &str) -> Result<Arc<RegionGeometry>> {
        let d = self.registry.descriptor(dataset).map_err(|e| PipelineError::Viz(e.to_string()))?;
        let g = d.geometry.ok_or_else(|| PipelineError::Viz(format!("dataset {dataset} has no geometry")))?;
        if let Some(cached) = self.geometry.get(&g.path) {
            return Ok(cached.clone());
        }
        let text =
            std::fs::read_to_string(&g.path).map_err(|e| PipelineError::Io(format!("{}: {e}", g.path.display())))?;
        let geometry = Arc::new(
            RegionGeometry::from_geojson(&text, &g.id_property).map_err(|e| PipelineError::Viz(e.to_string()))?,
        );
        self.geometry.insert(g.path.clone(), geometry.clone());
        Ok(geometry)
    }

    fn write_artifact(&self, turn: usize, plan_index: usize, ordinal: usize, chart: &Chart) -> Result<Artifact> {
        let dir = self.artifact_dir();
        let io = |p: &Path, e: std::io::Error| PipelineError::Io(format!("{}: {e}", p.display()));
        std::fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
        let kind = chart.kind.name();
        let name = format!("turn-{turn}-plan-{plan_index}-{kind}");
        let (file, data_file) = (format!("{name}.svg"), format!("{name}.json"));
        let (path, data_path) = (dir.join(&file), dir.join(&data_file));
        std::fs::write(&path, &chart.svg).map_err(|e| io(&path, e))?;
        let data = serde_json::to_string_pretty(&chart.data).expect("chart data serializes");
        std::fs::write(&data_path, data).map_err(|e| io(&data_path, e))?;
        Ok(Artifact { name, kind: kind.to_string(), plan_index, ordinal, file, data_file, path, data_path })
    }

    fn explain(&self, turn: &mut ChatTurn, produced: &[Produced]) {
        let mut parts = Vec::new();
        for (i, plan) in turn.plans.iter().enumerate() {
            let text = match (&turn.results[i].outcome, &produced[i]) {
                (Outcome::Error { message }, _) => format!("Step {} could not be completed: {message}", i + 1),
                (Outcome::Chart { .. }, _) => match &plan.kind {
                    PlanKind::Viz { directive, title, .. } => format!("Chart ({}): {title}.", chart_label(directive)),
                    _ => continue,
                },
                (Outcome::Ok { tables }, _) => {
                    let need = turn
                        .tasks
                        .iter()
                        .find(|t| t.ordinal == plan.ordinal)
                        .map(|t| t.kappa.clone())
                        .unwrap_or_default();
                    let req = ExplainRequest {
                        question: turn.query.clone(),
                        grain: self.config.rules.classify(&need).and_then(|r| r.grain),
                        need,
                        intent: plan.intent,
                        dataset: plan.tables.join(", "),
                        plan: plan.describe(),
                        tables: tables.clone(),
                    };
                    match self.agent.explain(&req) {
                        Ok(text) => text,
                        Err(e) => format!("Explanation unavailable: {e}"),
                    }
                }
            };
            turn.explanations.push(super::session::PlanExplanation { plan_index: i, text: text.clone() });
            parts.push(text);
        }
        turn.explanation = parts.join("\n");
    }
}

fn chart_label(d: &VizDirective) -> &'static str {
    match d {
        VizDirective::TrendLine { .. } => "trend line",
        VizDirective::Choropleth { .. } => "hot spot map",
        VizDirective::ClusterScatter => "cluster scatter plot",
        VizDirective::BarChart { .. } => "bar chart",
    }
}

fn fail(turn: &mut ChatTurn, stage: &str, e: &PipelineError) {
    turn.explanation = format!("I could not answer this question ({stage} failed): {e}");
    turn.error = Some(TurnError { stage: stage.to_string(), code: e.code().to_string(), message: e.to_string() });
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}
