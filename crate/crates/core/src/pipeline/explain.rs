//! Template explanations. Every number in the text is copied from a result
//! cell, a row count or a column total, never computed otherwise.

use serde::Serialize;

use super::rules::{Grain, Intent};
use crate::store::{format_number, Table, Value, ValueKind};

/// Rows kept per table in turn records and responses.
pub const MAX_DOC_ROWS: usize = 500;
pub const NO_RECORDS: &str = "no matching records";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnDoc {
    pub name: String,
    pub kind: ValueKind,
}

/// A result table as shown to people: schema plus row-major cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableDoc {
    pub name: String,
    pub columns: Vec<ColumnDoc>,
    pub rows: Vec<Vec<Value>>,
    pub total_rows: usize,
}

impl TableDoc {
    pub fn from_table(table: &Table) -> TableDoc {
        TableDoc {
            name: table.name().to_string(),
            columns: table.schema().iter().map(|c| ColumnDoc { name: c.name.clone(), kind: c.kind }).collect(),
            rows: table.rows().take(MAX_DOC_ROWS).collect(),
            total_rows: table.row_count(),
        }
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    fn numbers(&self, col: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[col].as_f64().unwrap_or(0.0)).collect()
    }
}

/// What the agent is asked to explain: one executed plan's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplainRequest {
    pub question: String,
    pub need: String,
    pub intent: Intent,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grain: Option<Grain>,
    pub dataset: String,
    pub plan: String,
    /// The result table first, then any summary table.
    pub tables: Vec<TableDoc>,
}

pub fn explain_with_templates(req: &ExplainRequest) -> String {
    let Some(result) = req.tables.first() else {
        return format!("{NO_RECORDS} in {}.", req.dataset);
    };
    if result.total_rows == 0 {
        return format!("{NO_RECORDS} in {}.", req.dataset);
    }
    match req.intent {
        Intent::Trend => trend(req, result),
        Intent::Hotspot => hotspot(req, result),
        Intent::Category => clusters(req, result),
        Intent::Predict => prediction(req, result),
        Intent::Classify => classification(req, result),
        Intent::Lookup => lookup(req, result),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "(blank)".into(),
        other => other.to_string(),
    }
}

fn total(values: &[f64]) -> String {
    format_number(values.iter().sum())
}

/// Index of the first maximum.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn trend(req: &ExplainRequest, t: &TableDoc) -> String {
    let m = t.columns.len() - 1;
    let values = t.numbers(m);
    let n = t.rows.len();
    let peak = argmax(&values);
    let (first, last) = (cell(&t.rows[0][0]), cell(&t.rows[n - 1][0]));
    let unit = if req.grain == Some(Grain::Month) { "month" } else { "year" };
    let units = if n == 1 { unit.to_string() } else { format!("{unit}s") };
    let mut text = format!(
        "{} records {} incidents across {} {units} from {first} to {last}. The highest {unit} was {} with {}.",
        req.dataset,
        total(&values),
        t.total_rows,
        cell(&t.rows[peak][0]),
        format_number(values[peak]),
    );
    if unit == "year" && n >= 3 {
        let third = n / 3;
        let early: f64 = values[..third].iter().sum::<f64>() / third as f64;
        let late: f64 = values[n - third..].iter().sum::<f64>() / third as f64;
        let judgement = if late > early * 1.1 {
            "higher than in the earliest years, so the situation is worsening"
        } else if late < early * 0.9 {
            "lower than in the earliest years, so the situation is improving"
        } else {
            "about the same as in the earliest years, so the situation is stable"
        };
        text.push_str(&format!(" Totals in the most recent years are {judgement}."));
    }
    text
}

fn region_unit(column: &str) -> &'static str {
    let c = column.to_lowercase();
    ["district", "division", "province", "state", "county"].into_iter().find(|u| c.contains(u)).unwrap_or("region")
}

fn hotspot(req: &ExplainRequest, t: &TableDoc) -> String {
    let unit = region_unit(&t.columns[0].name);
    let values = t.numbers(t.columns.len() - 1);
    let top = argmax(&values);
    let mut text =
        format!("{} is the hot spot with the most incidents ({}).", cell(&t.rows[top][0]), format_number(values[top]));
    if let Some(second) =
        (0..values.len()).filter(|&i| i != top).max_by(|a, b| values[*a].total_cmp(&values[*b]).then(b.cmp(a)))
    {
        text.push_str(&format!(" It is followed by {} ({}).", cell(&t.rows[second][0]), format_number(values[second])));
    }
    text.push_str(&format!(
        " In {}, {} incidents are spread over {} {unit}{}.",
        req.dataset,
        total(&values),
        t.total_rows,
        if t.total_rows == 1 { "" } else { "s" }
    ));
    text
}

fn clusters(req: &ExplainRequest, t: &TableDoc) -> String {
    let Some(summary) = req.tables.get(1) else {
        return format!("{} rows of {} were grouped.", t.total_rows, req.dataset);
    };
    let (size, terms) = (summary.col("size"), summary.col("top_terms"));
    let mut text =
        format!("{} rows of {} were grouped into {} clusters.", t.total_rows, req.dataset, summary.total_rows);
    for row in &summary.rows {
        text.push_str(&format!(" Cluster {}", cell(&row[0])));
        if let Some(s) = size {
            text.push_str(&format!(" has {} rows", cell(&row[s])));
        }
        match terms.map(|i| cell(&row[i])) {
            Some(terms) if !terms.is_empty() && terms != "(blank)" => text.push_str(&format!(" (top terms: {terms}).")),
            _ => text.push('.'),
        }
    }
    text
}

fn prediction(req: &ExplainRequest, t: &TableDoc) -> String {
    let target = t.columns.last().map_or("the target", |c| c.name.as_str());
    let mut text = format!("Predicted {target} for {} rows of {}.", t.total_rows, req.dataset);
    if let Some(coef) = req.tables.get(1) {
        let terms: Vec<String> = coef.rows.iter().map(|r| format!("{} {}", cell(&r[0]), cell(&r[1]))).collect();
        text.push_str(&format!(" Fitted terms: {}.", terms.join(", ")));
    }
    text
}

fn classification(req: &ExplainRequest, t: &TableDoc) -> String {
    let mut text = format!("Classified {} rows of {}.", t.total_rows, req.dataset);
    if let Some(classes) = req.tables.get(1) {
        let parts: Vec<String> = classes.rows.iter().map(|r| format!("{} {}", cell(&r[0]), cell(&r[1]))).collect();
        text.push_str(&format!(" Rows per class: {}.", parts.join(", ")));
    }
    text
}

fn lookup(req: &ExplainRequest, t: &TableDoc) -> String {
    let count = t.col("count").map(|i| t.rows[0][i].as_f64().unwrap_or(0.0)).unwrap_or(t.total_rows as f64);
    if count == 0.0 {
        return format!("{NO_RECORDS} in {}.", req.dataset);
    }
    format!("{} matching records in {}.", format_number(count), req.dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::ColumnSpec;

    fn doc(cols: &[(&str, ValueKind)], rows: Vec<Vec<Value>>) -> TableDoc {
        let schema = cols.iter().map(|(n, k)| ColumnSpec::new(*n, *k)).collect();
        TableDoc::from_table(&Table::from_rows("r", schema, rows).unwrap())
    }

    fn req(intent: Intent, grain: Option<Grain>, tables: Vec<TableDoc>) -> ExplainRequest {
        ExplainRequest {
            question: String::new(),
            need: String::new(),
            intent,
            grain,
            dataset: "D".into(),
            plan: String::new(),
            tables,
        }
    }

    #[test]
    fn trend_names_peak_and_total() {
        let t = doc(
            &[("month", ValueKind::Text), ("count", ValueKind::Int)],
            vec![
                vec![Value::text("2020-01"), Value::Int(4)],
                vec![Value::text("2020-02"), Value::Int(9)],
                vec![Value::text("2020-03"), Value::Int(2)],
            ],
        );
        let text = explain_with_templates(&req(Intent::Trend, Some(Grain::Month), vec![t]));
        assert_eq!(
            text,
            "D records 15 incidents across 3 months from 2020-01 to 2020-03. The highest month was 2020-02 with 9."
        );
    }

    #[test]
    fn hotspot_names_the_maximum_region() {
        let t = doc(
            &[("district-tag", ValueKind::Text), ("count", ValueKind::Int)],
            vec![vec![Value::text("Dhaka"), Value::Int(12)], vec![Value::text("Khulna"), Value::Int(5)]],
        );
        let text = explain_with_templates(&req(Intent::Hotspot, None, vec![t]));
        assert!(
            text.starts_with("Dhaka is the hot spot with the most incidents (12). It is followed by Khulna (5)."),
            "{text}"
        );
        assert!(text.ends_with("17 incidents are spread over 2 districts."));
    }

    #[test]
    fn empty_results_say_so() {
        let t = doc(&[("month", ValueKind::Text), ("count", ValueKind::Int)], vec![]);
        assert_eq!(explain_with_templates(&req(Intent::Trend, None, vec![t])), "no matching records in D.");
        let t = doc(&[("count", ValueKind::Int)], vec![vec![Value::Int(0)]]);
        assert_eq!(explain_with_templates(&req(Intent::Lookup, None, vec![t])), "no matching records in D.");
    }
}
