use std::sync::Arc;

use inquest::fixture::{generate, GroundTruth, NGOREP_DESCRIPTION, PROTHOMALO, PROTHOMALO_DESCRIPTION, SCRIPT};
use inquest::ml::{execute_mql, ExecContext, Execution};
use inquest::mql::parse_statement;
use inquest::pipeline::{
    render_json, render_text, resolve_data, Agent, AgentError, ChatTurn, DeterministicAgent, ExplainRequest, LlmAgent,
    Outcome, PipelineError, PlanKind, Session, SessionConfig, Task, TaskKind, TaskList, Transport,
};
use inquest::store::{Registry, Value};
use inquest_testkit::tally::Csv;
use inquest_testkit::{cosine_scores, unsupported_numbers};

struct World {
    dir: tempfile::TempDir,
    registry: Arc<Registry>,
    truth: GroundTruth,
    csv: Csv,
}

fn world(rows: usize) -> World {
    let dir = tempfile::tempdir().unwrap();
    let fx = generate(rows, 42);
    let paths = fx.write(&dir.path().join("data")).unwrap();
    let registry = Arc::new(Registry::open(&paths.manifest).unwrap());
    World { csv: Csv::parse(&fx.prothomalo_csv), truth: fx.truth, registry, dir }
}

fn session(w: &World, id: &str) -> Session {
    let config = SessionConfig { artifact_dir: w.dir.path().join("artifacts"), ..SessionConfig::default() };
    Session::new(id, w.registry.clone(), config)
}

fn cells(turn: &ChatTurn) -> Vec<Vec<Vec<String>>> {
    turn.tables().map(|t| t.rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect()).collect()
}

#[test]
fn monthly_trend_turn_matches_tally() {
    let w = world(300);
    let mut s = session(&w, "s1");
    let turn = s.run_turn(SCRIPT[0]);
    assert!(turn.error.is_none(), "{:?}", turn.error);
    assert_eq!(turn.plans.len(), 2);
    assert!(matches!(turn.plans[0].kind, PlanKind::Agg { .. }));
    assert!(matches!(turn.plans[1].kind, PlanKind::Viz { .. }));
    let Outcome::Ok { tables } = &turn.results[0].outcome else { panic!("{:?}", turn.results[0]) };
    let got: Vec<(String, u64)> =
        tables[0].rows.iter().map(|r| (r[0].to_string(), r[1].as_f64().unwrap() as u64)).collect();
    let want: Vec<(String, u64)> = w.csv.monthly("last-published-at").into_iter().collect();
    assert_eq!(got, want);
    assert_eq!(turn.artifacts.len(), 1);
    assert!(turn.artifacts[0].path.exists() && turn.artifacts[0].data_path.exists());
    assert!(turn.explanation.contains(&w.truth.peak_month), "{}", turn.explanation);
}

#[test]
fn hotspot_turn_names_the_top_district() {
    let w = world(300);
    let turn = session(&w, "s").run_turn(SCRIPT[1]);
    assert!(turn.error.is_none(), "{:?}", turn.error);
    assert_eq!(turn.artifacts[0].kind, "choropleth");
    let top = w.csv.tally("district-tag").into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).unwrap().0;
    assert_eq!(top, w.truth.top_district);
    assert!(turn.explanation.starts_with(&top), "{}", turn.explanation);
}

#[test]
fn category_turn_equals_direct_execution() {
    let w = world(300);
    let turn = session(&w, "s").run_turn(SCRIPT[3]);
    assert!(turn.error.is_none(), "{:?}", turn.error);
    let PlanKind::Mql { statement } = &turn.plans[0].kind else { panic!() };
    let reference =
        parse_statement("GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;")
            .unwrap();
    assert!(parse_statement(statement).unwrap().same_structure(&reference));
    let Execution::Ml(direct) = execute_mql(&reference, &ExecContext::new(&w.registry).with_seed(42)).unwrap() else {
        panic!()
    };
    let Outcome::Ok { tables } = &turn.results[0].outcome else { panic!() };
    let via_turn: Vec<Value> = tables[0].rows.iter().map(|r| r.last().unwrap().clone()).collect();
    let direct: Vec<Value> = direct.table.column("cluster").unwrap().to_vec();
    assert_eq!(via_turn, direct);
    assert_eq!(turn.artifacts[0].kind, "cluster_scatter");
}

#[test]
fn resolution_scores_match_independent_cosine() {
    let w = world(50);
    let need = "rape incident reports with dates";
    let b = resolve_data(need, 1, &w.registry).unwrap();
    let oracle = cosine_scores(need, &[PROTHOMALO_DESCRIPTION, NGOREP_DESCRIPTION]);
    assert_eq!(b.table, PROTHOMALO);
    assert!(oracle[0] > oracle[1]);
    assert!((b.score - oracle[0]).abs() < 1e-12);
    assert!((b.runner_up.unwrap().score - oracle[1]).abs() < 1e-12);
    assert!(matches!(resolve_data("satellite imagery", 1, &w.registry), Err(PipelineError::NoDatasetMatch { .. })));
}

/// Maps every question to a query task followed by a data task.
struct Backwards;
impl Agent for Backwards {
    fn name(&self) -> &str {
        "backwards"
    }
    fn map_query(&self, _: &str) -> Result<TaskList, PipelineError> {
        TaskList::new(vec![
            Task::query("count incidents per month and plot trend", 1),
            Task::data("incident reports", 2),
        ])
    }
    fn explain(&self, _: &ExplainRequest) -> Result<String, AgentError> {
        Ok(String::new())
    }
}

#[test]
fn query_before_data_is_an_ordering_error_and_session_survives() {
    let w = world(50);
    let mut s = session(&w, "s");
    s.set_agent(Arc::new(Backwards));
    let turn = s.run_turn("anything");
    assert_eq!(turn.error.as_ref().map(|e| e.code.as_str()), Some("ordering"));
    assert!(turn.explanation.contains("no preceding data task"));
    s.set_agent(Arc::new(DeterministicAgent::default()));
    assert!(s.run_turn(SCRIPT[0]).error.is_none());
    assert_eq!(s.history().len(), 2);
}

#[test]
fn plans_follow_task_ordinals() {
    let w = world(100);
    let turn = session(&w, "s")
        .run_turn("Show the monthly trend and the district hot spots, then the top 4 categories of headlines.");
    assert!(turn.error.is_none(), "{:?}", turn.error);
    let ordinals: Vec<usize> = turn.plans.iter().map(|p| p.ordinal).collect();
    let mut sorted = ordinals.clone();
    sorted.sort();
    assert_eq!(ordinals, sorted);
    assert_eq!(turn.tasks.iter().filter(|t| t.chi == TaskKind::Query).count(), 3);
    assert_eq!(turn.artifacts.len(), 3);
}

#[test]
fn scripted_conversation_is_reproducible_and_grounded() {
    let run = || {
        let w = world(300);
        let mut s = session(&w, "repro");
        let turns: Vec<ChatTurn> = SCRIPT.iter().map(|q| s.run_turn(q)).collect();
        let svgs: Vec<Vec<u8>> =
            turns.iter().flat_map(|t| &t.artifacts).map(|a| std::fs::read(&a.path).unwrap()).collect();
        (render_text(&turns), render_json(&turns), svgs, turns)
    };
    let (text_a, json_a, svg_a, turns) = run();
    let (text_b, json_b, svg_b, _) = run();
    assert_eq!(text_a, text_b);
    assert_eq!(json_a, json_b);
    assert_eq!(svg_a, svg_b);
    assert_eq!(svg_a.len(), 4);
    for t in &turns {
        assert!(t.error.is_none(), "turn {}: {:?}", t.index, t.error);
        for e in &t.explanations {
            assert!(unsupported_numbers(&e.text, &cells(t)).is_empty(), "turn {}: {}", t.index, e.text);
        }
    }
}

struct Unreachable;
impl Transport for Unreachable {
    fn send(&self, _: &str) -> Result<String, String> {
        Err("connection refused".into())
    }
}

#[test]
fn unreachable_external_agent_yields_a_diagnostic() {
    let w = world(50);
    let mut s = session(&w, "s");
    s.set_agent(Arc::new(LlmAgent::new(Unreachable)));
    let turn = s.run_turn(SCRIPT[0]);
    assert_eq!(turn.error.as_ref().map(|e| e.stage.as_str()), Some("map"));
    assert!(turn.explanation.contains("connection refused"));
    let empty = s.run_turn("");
    assert!(empty.error.is_some());
}
