//! Plain-text and JSON renderings of a conversation. Neither contains
//! session ids, filesystem paths or timings, so equal conversations render
//! to equal bytes.

use std::fmt::Write;

use super::session::{ChatTurn, Outcome};

pub fn render_text(turns: &[ChatTurn]) -> String {
    let mut out = String::new();
    for t in turns {
        render_turn(&mut out, t);
    }
    out
}

fn render_turn(out: &mut String, t: &ChatTurn) {
    let _ = writeln!(out, "# turn {}", t.index);
    let _ = writeln!(out, "> {}", t.query);
    if !t.tasks.is_empty() {
        let _ = writeln!(out, "tasks:");
        for task in &t.tasks {
            let _ = writeln!(out, "  {}. {}: {}", task.ordinal, task.chi.name(), task.kappa);
        }
    }
    if !t.bindings.is_empty() {
        let _ = writeln!(out, "bindings:");
        for b in &t.bindings {
            let runner = match &b.runner_up {
                Some(r) => format!("; runner-up {} {:.4}", r.table, r.score),
                None => String::new(),
            };
            let _ = writeln!(out, "  task {} -> {} (score {:.4}{runner})", b.ordinal, b.table, b.score);
        }
    }
    if !t.plans.is_empty() {
        let _ = writeln!(out, "plans:");
        for (i, p) in t.plans.iter().enumerate() {
            let status = match t.results.get(i).map(|r| &r.outcome) {
                Some(Outcome::Ok { tables }) => {
                    let rows: Vec<String> = tables.iter().map(|d| d.total_rows.to_string()).collect();
                    format!("ok, {} rows", rows.join("+"))
                }
                Some(Outcome::Chart { .. }) => "ok".to_string(),
                Some(Outcome::Error { message }) => format!("error: {message}"),
                None => "not run".to_string(),
            };
            let _ = writeln!(out, "  [{i}] task {} {} -> {status}", p.ordinal, p.describe());
        }
    }
    if !t.artifacts.is_empty() {
        let _ = writeln!(out, "artifacts:");
        for a in &t.artifacts {
            let _ = writeln!(out, "  {} ({})", a.file, a.data_file);
        }
    }
    if let Some(e) = &t.error {
        let _ = writeln!(out, "error: {} ({}): {}", e.stage, e.code, e.message);
    }
    let _ = writeln!(out, "explanation:");
    for line in t.explanation.lines() {
        let _ = writeln!(out, "  {line}");
    }
    out.push('\n');
}

/// The JSON sidecar: turns without session ids or timings.
pub fn render_json(turns: &[ChatTurn]) -> String {
    let docs: Vec<serde_json::Value> = turns
        .iter()
        .map(|t| {
            let mut v = serde_json::to_value(t.without_timing()).expect("turns serialize");
            if let Some(obj) = v.as_object_mut() {
                obj.remove("session_id");
            }
            v
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&serde_json::json!({ "turns": docs })).expect("json");
    s.push('\n');
    s
}
