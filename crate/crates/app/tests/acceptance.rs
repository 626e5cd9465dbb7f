//! The end-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does.

use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use inquest::fixture::{generate, FixturePaths, GroundTruth, PROTHOMALO, PROTHOMALO_COLUMNS, SCRIPT};
use inquest::ml::{
    execute_mql, kmeans, validate_mql, Encoding, ExecContext, Execution, FeatureMatrix, MlError, ModelParams,
    ModelStore, Provenance,
};
use inquest::mql::parse_statement;
use inquest::pipeline::{
    render_json, render_text, Agent, AgentError, ChatTurn, ExplainRequest, PipelineError, Session, SessionConfig, Task,
    TaskList,
};
use inquest::store::{run_aggregation, Aggregate, AggregationPlan, GroupKey, Registry, Value};
use inquest::viz::{render_ml_result, ChartKind};
use inquest_app::service::{spawn, ServiceConfig};
use inquest_testkit::data::{blobs, linear, noisy_classes, to_csv};
use inquest_testkit::mqlgen::statements;
use inquest_testkit::tally::Csv;
use inquest_testkit::{adjusted_rand_index, unsupported_numbers};
use serde_json::{json, Value as Json};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(dir: &Path, rows: usize) -> (FixturePaths, Csv, Registry) {
    let fx = generate(rows, 42);
    let paths = fx.write(dir).unwrap();
    let registry = Registry::open(&paths.manifest).unwrap();
    (paths, Csv::parse(&fx.prothomalo_csv), registry)
}

fn counts(table: &inquest::Table, key: &str) -> Vec<(String, u64)> {
    let (k, c) = (table.column(key).unwrap(), table.column("count").unwrap());
    k.iter().zip(c).map(|(k, c)| (k.to_string(), if let Value::Int(v) = c { *v as u64 } else { u64::MAX })).collect()
}

fn p1() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, registry) = fixture(dir.path(), 300);
    let start = Instant::now();
    let stmt = parse_statement("GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;")
        .map_err(|e| e.to_string())?;
    let ctx = ExecContext::new(&registry);
    validate_mql(&stmt, &ctx).map_err(|e| e.to_string())?;
    let Execution::Ml(result) = execute_mql(&stmt, &ctx).map_err(|e| e.to_string())? else {
        return Err("not an ML result".into());
    };
    let chart = render_ml_result(&result, "headline clusters").map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(chart.kind == ChartKind::ClusterScatter, || format!("chart kind {:?}", chart.kind))?;
    ensure(chart.svg.starts_with("<svg") && chart.svg.contains("<circle"), || "svg has no points".into())?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("scatter SVG in {} ms", elapsed.as_millis()))
}

fn p2() -> Check {
    let generated = statements(1000, 42);
    for s in &generated {
        let a = parse_statement(s).map_err(|e| format!("{s}: {e}"))?;
        let b = parse_statement(&a.to_string()).map_err(|e| format!("{a}: {e}"))?;
        ensure(a.same_structure(&b) && a.to_string() == b.to_string(), || format!("round trip differs for {s}"))?;
    }
    Ok(format!("{} statements round-trip", generated.len()))
}

fn p3() -> Check {
    for rows in [300, 5000] {
        let dir = tempfile::tempdir().unwrap();
        let (paths, csv, registry) = fixture(dir.path(), rows);
        let truth: GroundTruth = serde_json::from_slice(&std::fs::read(&paths.truth).unwrap()).unwrap();
        let monthly = run_aggregation(
            &AggregationPlan::new(PROTHOMALO)
                .group(GroupKey::Month("last-published-at".into()))
                .aggregate(Aggregate::count_all()),
            &registry,
        )
        .map_err(|e| e.to_string())?;
        let want: Vec<(String, u64)> = truth.monthly.clone().into_iter().collect();
        ensure(counts(&monthly, "month") == want, || format!("{rows} rows: monthly tally differs"))?;
        ensure(csv.monthly("last-published-at") == truth.monthly, || {
            format!("{rows} rows: sidecar disagrees with CSV")
        })?;
        let districts = run_aggregation(
            &AggregationPlan::new(PROTHOMALO)
                .group(GroupKey::Column("district-tag".into()))
                .aggregate(Aggregate::count_all()),
            &registry,
        )
        .map_err(|e| e.to_string())?;
        let want: Vec<(String, u64)> = truth.districts.clone().into_iter().collect();
        ensure(counts(&districts, "district-tag") == want, || format!("{rows} rows: district tally differs"))?;
        ensure(csv.tally("district-tag") == truth.districts, || format!("{rows} rows: district sidecar disagrees"))?;
    }
    Ok("monthly and district tallies match at 300 and 5000 rows".into())
}

fn p4() -> Check {
    let mut scores = Vec::new();
    for rows in [30, 300] {
        let dir = tempfile::tempdir().unwrap();
        let (paths, _, registry) = fixture(dir.path(), rows);
        let truth: GroundTruth = serde_json::from_slice(&std::fs::read(&paths.truth).unwrap()).unwrap();
        let stmt = parse_statement("GENERATE CLUSTER OF 3 FEATURES headline FROM ProthomAlo;").unwrap();
        let Ok(Execution::Ml(r)) = execute_mql(&stmt, &ExecContext::new(&registry)) else {
            return Err("headline clustering failed".into());
        };
        let c = r.clustering.ok_or("no clustering")?;
        let ari = adjusted_rand_index(&c.assignments, &truth.topics);
        ensure(ari >= 0.9, || format!("{rows} headlines: ARI {ari:.3}"))?;
        ensure(c.inertia_non_increasing(), || "headline inertia increased".into())?;
        scores.push(ari);
    }
    let planted = blobs(40, 42);
    let prov = ["x", "y"].map(|c| Provenance { column: c.into(), encoding: Encoding::Numeric }).to_vec();
    let x = FeatureMatrix::from_rows(planted.rows.clone(), prov).map_err(|e| e.to_string())?;
    let c = kmeans(&x, 3, 42).map_err(|e| e.to_string())?;
    let ari = adjusted_rand_index(&c.assignments, &planted.labels);
    ensure(ari >= 0.9, || format!("blobs: ARI {ari:.3}"))?;
    ensure(c.inertia_non_increasing(), || "blob inertia increased".into())?;
    Ok(format!("ARI headlines {:.3}/{:.3}, blobs {ari:.3}", scores[0], scores[1]))
}

fn p5() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let registry = Registry::new();
    let weights = [2.0, -3.0, 0.5];
    let lin = dir.path().join("lin.csv");
    std::fs::write(&lin, to_csv(&["x1", "x2", "x3", "y"], &linear(200, &weights, 1.5, 42))).unwrap();
    registry.register_csv("lin", &lin, "noiseless linear data", None).map_err(|e| e.to_string())?;
    let noisy = dir.path().join("noisy.csv");
    std::fs::write(&noisy, to_csv(&["a", "b", "class"], &noisy_classes(300, 0.3, 42))).unwrap();
    registry.register_csv("noisy", &noisy, "labels with flipped noise", None).map_err(|e| e.to_string())?;
    let store = ModelStore::new(dir.path().join("models"));
    let ctx = ExecContext::new(&registry).with_models(&store);

    let stmt = parse_statement(
        "CONSTRUCT MODEL lin_fit AS PREDICTION y WITH MODEL ACCURACY 0.5 FEATURES x1, x2, x3 FROM lin;",
    )
    .map_err(|e| e.to_string())?;
    let Execution::Model(model) = execute_mql(&stmt, &ctx).map_err(|e| e.to_string())? else {
        return Err("CONSTRUCT did not produce a model".into());
    };
    let ModelParams::Linear { coefficients, intercept, .. } = &model.params else {
        return Err("not a linear model".into());
    };
    let worst = coefficients.iter().zip(&weights).map(|(a, b)| (a - b).abs()).fold((intercept - 1.5).abs(), f64::max);
    ensure(worst < 1e-6, || format!("weights off by {worst:e}"))?;

    let stmt = parse_statement(
        "GENERATE CLASSIFICATION INTO pos, neg WITH MODEL ACCURACY 0.99 LABEL class FEATURES a, b FROM noisy;",
    )
    .map_err(|e| e.to_string())?;
    match execute_mql(&stmt, &ctx) {
        Err(e) => match e.error {
            MlError::Accuracy { accuracy, threshold } => {
                ensure(threshold == 0.99 && accuracy < 0.99, || format!("accuracy {accuracy} threshold {threshold}"))?;
                let msg = e.to_string();
                ensure(msg.contains(&accuracy.to_string()) && msg.contains("0.99"), || {
                    format!("message lacks values: {msg}")
                })?;
                Ok(format!("weights within {worst:.1e}; noisy classifier rejected at {accuracy:.3} < 0.99"))
            }
            other => Err(format!("wrong error: {other}")),
        },
        Ok(_) => Err("noisy classifier passed the 0.99 gate".into()),
    }
}

struct Backwards;
impl Agent for Backwards {
    fn name(&self) -> &str {
        "backwards"
    }
    fn map_query(&self, _: &str) -> Result<TaskList, PipelineError> {
        TaskList::new(vec![Task::query("count reports", 1), Task::data("incident reports", 2)])
    }
    fn explain(&self, _: &ExplainRequest) -> Result<String, AgentError> {
        Ok(String::new())
    }
}

fn session(registry: &Arc<Registry>, dir: &Path, id: &str) -> Session {
    let config = SessionConfig { artifact_dir: dir.join("artifacts"), ..SessionConfig::default() };
    Session::new(id, registry.clone(), config)
}

fn p6() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, registry) = fixture(&dir.path().join("data"), 300);
    let registry = Arc::new(registry);
    let mut s = session(&registry, dir.path(), "p6");
    s.set_agent(Arc::new(Backwards));
    let bad = s.run_turn("anything");
    let err = bad.error.as_ref().ok_or("no error recorded")?;
    ensure(err.code == "ordering", || format!("error code {}", err.code))?;

    let mut s = session(&registry, dir.path(), "p6b");
    let turn = s.run_turn(&format!("{} {}", SCRIPT[0], SCRIPT[1]));
    ensure(turn.error.is_none(), || format!("{:?}", turn.error))?;
    let ordinals: Vec<usize> = turn.plans.iter().map(|p| p.ordinal).collect();
    let mut sorted = ordinals.clone();
    sorted.sort();
    ensure(ordinals == sorted && ordinals.len() >= 4, || format!("plan ordinals {ordinals:?}"))?;
    Ok(format!("ordering error raised; plan ordinals {ordinals:?}"))
}

fn scripted(dir: &Path) -> (String, String, Vec<Vec<u8>>, Vec<ChatTurn>) {
    let (_, _, registry) = fixture(&dir.join("data"), 300);
    let mut s = session(&Arc::new(registry), dir, "script");
    let turns: Vec<ChatTurn> = SCRIPT.iter().map(|q| s.run_turn(q)).collect();
    let svgs = turns.iter().flat_map(|t| &t.artifacts).map(|a| std::fs::read(&a.path).unwrap()).collect();
    (render_text(&turns), render_json(&turns), svgs, turns)
}

fn p7() -> Check {
    let start = Instant::now();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (text_a, json_a, svg_a, turns) = scripted(a.path());
    let (text_b, json_b, svg_b, _) = scripted(b.path());
    let elapsed = start.elapsed();
    ensure(text_a == text_b && json_a == json_b, || "transcripts differ between runs".into())?;
    ensure(svg_a == svg_b && !svg_a.is_empty(), || "artifacts differ between runs".into())?;
    for t in &turns {
        ensure(t.error.is_none(), || format!("turn {} failed: {:?}", t.index, t.error))?;
        let cells: Vec<Vec<Vec<String>>> =
            t.tables().map(|tb| tb.rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect()).collect();
        let bad = unsupported_numbers(&t.explanation, &cells);
        ensure(bad.is_empty(), || format!("turn {} cites unsupported numbers {bad:?}", t.index))?;
    }
    ensure(elapsed < Duration::from_secs(60), || format!("two runs took {elapsed:?}"))?;
    Ok(format!("{} artifacts identical, grounded, {} ms per run", svg_a.len(), elapsed.as_millis() / 2))
}

fn p8() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, registry) = fixture(dir.path(), 300);
    let table = registry.table(PROTHOMALO).map_err(|e| e.to_string())?;
    let names: Vec<&str> = table.column_names().collect();
    ensure(names == PROTHOMALO_COLUMNS, || format!("columns {names:?}"))?;
    Ok(format!("{} columns", names.len()))
}

fn post(http: &ureq::Agent, url: &str, body: Json) -> Json {
    let mut resp = http.post(url).header("content-type", "application/json").send(body.to_string()).unwrap();
    serde_json::from_slice(&resp.body_mut().read_to_vec().unwrap()).unwrap()
}

/// Runs each script in its own session, all concurrently, and returns each
/// session's rendered transcript plus artifact bytes.
fn run_scripts(scripts: &[Vec<&'static str>]) -> Vec<(String, Vec<Vec<u8>>)> {
    let dir = tempfile::tempdir().unwrap();
    let paths = generate(300, 42).write(&dir.path().join("data")).unwrap();
    let rt = tokio::runtime::Runtime::new().unwrap();
    let (addr, _) = rt.block_on(spawn(ServiceConfig::new(&paths.manifest, dir.path().join("artifacts")))).unwrap();
    let base = format!("http://{addr}");
    let http: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(60))).build().into();
    std::thread::scope(|scope| {
        let handles: Vec<_> = scripts
            .iter()
            .map(|script| {
                let (http, base) = (http.clone(), base.clone());
                scope.spawn(move || {
                    let id =
                        post(&http, &format!("{base}/sessions"), json!({}))["session_id"].as_str().unwrap().to_string();
                    let mut svgs = Vec::new();
                    for q in script {
                        let turn = post(&http, &format!("{base}/sessions/{id}/messages"), json!({ "text": q }));
                        for a in turn["artifacts"].as_array().unwrap() {
                            let mut r = http.get(format!("{base}{}", a["url"].as_str().unwrap())).call().unwrap();
                            svgs.push(r.body_mut().read_to_vec().unwrap());
                        }
                    }
                    let mut r = http.get(format!("{base}/sessions/{id}/history")).call().unwrap();
                    let hist: Json = serde_json::from_slice(&r.body_mut().read_to_vec().unwrap()).unwrap();
                    (hist["transcript"].as_str().unwrap().to_string(), svgs)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn p9() -> Check {
    let a = vec![SCRIPT[0], SCRIPT[3], SCRIPT[0]];
    let b = vec![SCRIPT[3], SCRIPT[0], SCRIPT[3]];
    let together = run_scripts(&[a.clone(), b.clone()]);
    let solo_a = run_scripts(&[a]).remove(0);
    let solo_b = run_scripts(&[b]).remove(0);
    ensure(together[0] == solo_a, || "session A differs from its solo run".into())?;
    ensure(together[1] == solo_b, || "session B differs from its solo run".into())?;
    ensure(solo_a.0 != solo_b.0, || "scripts are indistinguishable".into())?;
    Ok("concurrent sessions match their solo transcripts and artifacts".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] =
        [("P1", p1), ("P2", p2), ("P3", p3), ("P4", p4), ("P5", p5), ("P6", p6), ("P7", p7), ("P8", p8), ("P9", p9)];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name} {detail}"),
            Err(detail) => {
                println!("FAIL {name} {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
