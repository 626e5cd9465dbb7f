use serde::Serialize;

use super::rules::{Grain, Intent};
use crate::store::{AggregationPlan, GroupKey};

/// How a chart is drawn from the output of an earlier plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum VizDirective {
    TrendLine {
        grain: Grain,
        key: String,
        measure: String,
    },
    /// Regions keyed by `region_column`; geometry comes from the dataset's
    /// registered geometry reference.
    Choropleth {
        region_column: String,
        measure: String,
    },
    ClusterScatter,
    BarChart {
        key: String,
        measure: String,
    },
}

impl VizDirective {
    pub fn name(&self) -> &'static str {
        match self {
            VizDirective::TrendLine { .. } => "trend",
            VizDirective::Choropleth { .. } => "choropleth",
            VizDirective::ClusterScatter => "cluster_scatter",
            VizDirective::BarChart { .. } => "bar",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PlanKind {
    /// A canonical MQL statement.
    Mql {
        statement: String,
    },
    Agg {
        plan: AggregationPlan,
    },
    /// `input` is the index of the plan (within the turn) whose output is drawn.
    Viz {
        directive: VizDirective,
        input: usize,
        title: String,
    },
}

/// One executable step derived from a query task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryPlan {
    /// Ordinal of the query task this plan came from.
    pub ordinal: usize,
    pub intent: Intent,
    pub tables: Vec<String>,
    #[serde(flatten)]
    pub kind: PlanKind,
}

impl QueryPlan {
    /// One-line description used in transcripts.
    pub fn describe(&self) -> String {
        match &self.kind {
            PlanKind::Mql { statement } => format!("mql: {statement}"),
            PlanKind::Agg { plan } => format!("aggregate: {}", describe_agg(plan)),
            PlanKind::Viz { directive, input, title } => {
                format!("chart: {} of plan {input} ({title})", directive.name())
            }
        }
    }
}

fn describe_agg(plan: &AggregationPlan) -> String {
    let aggs: Vec<String> = plan
        .aggregates
        .iter()
        .map(|a| {
            let arg = a.column.as_deref().unwrap_or("*");
            match &a.alias {
                Some(alias) => format!("{}({arg}) AS {alias}", a.func.name()),
                None => format!("{}({arg})", a.func.name()),
            }
        })
        .collect();
    let mut out = format!("{} FROM {}", aggs.join(", "), plan.source);
    if let Some(c) = &plan.filter {
        out.push_str(&format!(" WHERE {c}"));
    }
    if !plan.group_by.is_empty() {
        let keys: Vec<String> = plan
            .group_by
            .iter()
            .map(|k| match k {
                GroupKey::Column(c) => c.clone(),
                GroupKey::Month(c) => format!("MONTH({c})"),
                GroupKey::Year(c) => format!("YEAR({c})"),
            })
            .collect();
        out.push_str(&format!(" GROUP BY {}", keys.join(", ")));
    }
    if let Some(s) = &plan.sort {
        out.push_str(&format!(" ORDER BY {}{}", s.column, if s.descending { " DESC" } else { "" }));
    }
    if let Some(n) = plan.limit {
        out.push_str(&format!(" LIMIT {n}"));
    }
    out
}
