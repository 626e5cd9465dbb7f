//! Query task → executable plans, against the schema of the bound table.

use std::collections::BTreeSet;

use super::error::{PipelineError, Result};
use super::plan::{PlanKind, QueryPlan, VizDirective};
use super::resolve::Binding;
use super::rules::{Grain, Intent, IntentRules, Rule};
use super::task::{Task, TaskKind};
use super::text::{mentions, normalize, numeric_tokens, words};
use crate::ml::{validate_mql, ExecContext, PROSE_MIN_WORDS};
use crate::mql::{
    parse_statement, CmpOp, Condition, GenerateBody, IntExpr, Literal, MlTask, MqlStatement, Operand, Span,
    StatementBody, Using,
};
use crate::store::{
    AggFunc, Aggregate, AggregationPlan, DatasetDescriptor, GroupKey, Registry, Table, Value, ValueKind,
};

const REGION_HINTS: &[&str] = &["district", "region", "division", "province", "state", "county"];
const MAX_CLASSES: usize = 64;

/// Translates one query task. `binding` is the most recent data binding
/// in the turn; `base` is the number of plans already queued, so chart
/// plans can refer to their input by absolute index.
pub fn translate(
    task: &Task,
    binding: Option<&Binding>,
    registry: &Registry,
    rules: &IntentRules,
    base: usize,
) -> Result<Vec<QueryPlan>> {
    if task.chi != TaskKind::Query {
        return Err(PipelineError::Malformed(format!("task {} is not a query task", task.ordinal)));
    }
    let binding =
        binding.ok_or_else(|| PipelineError::Ordering { ordinal: task.ordinal, kappa: task.kappa.clone() })?;
    let table = registry.table(&binding.table).map_err(|e| PipelineError::Exec(e.to_string()))?;
    let descriptor = registry.descriptor(&binding.table).map_err(|e| PipelineError::Exec(e.to_string()))?;
    let rule = rules.classify(&task.kappa);
    let intent = rule.map_or(Intent::Lookup, |r| r.intent);
    let cx = Cx { task, table: &table, descriptor: &descriptor, registry, rules, base, intent };
    let plans = match (intent, rule) {
        (Intent::Trend, Some(Rule { grain: Some(Grain::Year), .. })) => cx.annual()?,
        (Intent::Trend, _) => cx.monthly()?,
        (Intent::Hotspot, _) => cx.hotspot()?,
        (Intent::Category, _) => cx.category()?,
        (Intent::Predict, _) => cx.predict()?,
        (Intent::Classify, _) => cx.classify()?,
        (Intent::Lookup, _) => cx.lookup(),
    };
    Ok(plans)
}

struct Cx<'a> {
    task: &'a Task,
    table: &'a Table,
    descriptor: &'a DatasetDescriptor,
    registry: &'a Registry,
    rules: &'a IntentRules,
    base: usize,
    intent: Intent,
}

impl Cx<'_> {
    fn name(&self) -> &str {
        self.table.name()
    }

    fn gap(&self, needed: &str) -> PipelineError {
        PipelineError::SchemaGap { intent: self.intent.name().into(), table: self.name().into(), needed: needed.into() }
    }

    fn plan(&self, kind: PlanKind) -> QueryPlan {
        QueryPlan { ordinal: self.task.ordinal, intent: self.intent, tables: vec![self.name().to_string()], kind }
    }

    fn viz(&self, directive: VizDirective, title: String, offset: usize) -> QueryPlan {
        self.plan(PlanKind::Viz { directive, input: self.base + offset, title })
    }

    fn columns_of(&self, pred: impl Fn(ValueKind) -> bool) -> Vec<String> {
        self.table.schema().iter().filter(|c| pred(c.kind)).map(|c| c.name.clone()).collect()
    }

    /// Columns the need names, longest name first on overlap.
    fn mentioned(&self, among: &[String]) -> Vec<String> {
        among.iter().filter(|c| mentions(&self.task.kappa, c)).cloned().collect()
    }

    fn prefer_mentioned(&self, among: Vec<String>) -> Option<String> {
        self.mentioned(&among).into_iter().next().or_else(|| among.into_iter().next())
    }

    fn monthly(&self) -> Result<Vec<QueryPlan>> {
        let col = self
            .prefer_mentioned(self.columns_of(ValueKind::is_temporal))
            .ok_or_else(|| self.gap("a date or timestamp column"))?;
        let agg = AggregationPlan::new(self.name())
            .group(GroupKey::Month(col))
            .aggregate(Aggregate::count_all())
            .sort_by("month", false);
        Ok(vec![
            self.plan(PlanKind::Agg { plan: agg }),
            self.viz(
                VizDirective::TrendLine { grain: Grain::Month, key: "month".into(), measure: "count".into() },
                format!("Monthly incidents in {}", self.name()),
                0,
            ),
        ])
    }

    fn annual(&self) -> Result<Vec<QueryPlan>> {
        let year = self.table.schema().iter().find(|c| c.kind == ValueKind::Int && c.name.eq_ignore_ascii_case("year"));
        if let Some(year) = year {
            let measure = self
                .prefer_mentioned(
                    self.columns_of(ValueKind::is_numeric).into_iter().filter(|c| *c != year.name).collect(),
                )
                .ok_or_else(|| self.gap("a numeric count column besides the year"))?;
            let mut agg = AggregationPlan::new(self.name());
            if let Some(cat) = self.total_category() {
                agg = agg.filter(Condition::compare(
                    Operand::Column(cat),
                    CmpOp::Eq,
                    Operand::Literal(Literal::Text("total".into())),
                ));
            }
            let agg = agg
                .group(GroupKey::Column(year.name.clone()))
                .aggregate(Aggregate::of(AggFunc::Sum, &measure).alias("total"))
                .sort_by(&year.name, false);
            return Ok(vec![
                self.plan(PlanKind::Agg { plan: agg }),
                self.viz(
                    VizDirective::BarChart { key: year.name.clone(), measure: "total".into() },
                    format!("Annual totals in {}", self.name()),
                    0,
                ),
            ]);
        }
        let col = self
            .prefer_mentioned(self.columns_of(ValueKind::is_temporal))
            .ok_or_else(|| self.gap("a year or date column"))?;
        let agg = AggregationPlan::new(self.name())
            .group(GroupKey::Year(col))
            .aggregate(Aggregate::count_all())
            .sort_by("year", false);
        Ok(vec![
            self.plan(PlanKind::Agg { plan: agg }),
            self.viz(
                VizDirective::TrendLine { grain: Grain::Year, key: "year".into(), measure: "count".into() },
                format!("Annual incidents in {}", self.name()),
                0,
            ),
        ])
    }

    /// A text column holding the value `total`, marking pre-summed rows.
    fn total_category(&self) -> Option<String> {
        self.columns_of(|k| k == ValueKind::Text).into_iter().find(|c| {
            self.table
                .column(c)
                .is_some_and(|vals| vals.iter().any(|v| v.as_str().is_some_and(|s| s.eq_ignore_ascii_case("total"))))
        })
    }

    fn hotspot(&self) -> Result<Vec<QueryPlan>> {
        let geo = self.descriptor.geometry.as_ref().filter(|g| self.table.column_index(&g.region_column).is_some());
        let region = match geo {
            Some(g) => g.region_column.clone(),
            None => {
                let text = self.columns_of(|k| k == ValueKind::Text);
                REGION_HINTS
                    .iter()
                    .find_map(|h| text.iter().find(|c| c.to_lowercase().contains(h)).cloned())
                    .ok_or_else(|| self.gap("a district or region column"))?
            }
        };
        let agg = AggregationPlan::new(self.name())
            .group(GroupKey::Column(region.clone()))
            .aggregate(Aggregate::count_all())
            .sort_by("count", true);
        let directive = if geo.is_some() {
            VizDirective::Choropleth { region_column: region.clone(), measure: "count".into() }
        } else {
            VizDirective::BarChart { key: region.clone(), measure: "count".into() }
        };
        Ok(vec![
            self.plan(PlanKind::Agg { plan: agg }),
            self.viz(directive, format!("Incidents per {region} in {}", self.name()), 0),
        ])
    }

    fn category(&self) -> Result<Vec<QueryPlan>> {
        let text = self.columns_of(|k| k == ValueKind::Text);
        let col = self
            .mentioned(&text)
            .into_iter()
            .next()
            .or_else(|| {
                text.iter()
                    .map(|c| (c, mean_words(self.table.column(c).unwrap_or(&[]))))
                    .filter(|(_, w)| *w >= PROSE_MIN_WORDS)
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(c, _)| c.clone())
            })
            .ok_or_else(|| self.gap("a free-text column"))?;
        let k = self.rules.cluster_count(&self.task.kappa);
        let body = GenerateBody {
            display: true,
            task: MlTask::Cluster { k: IntExpr::Literal(k) },
            using: Some(Using::Algorithm("KMeans".into())),
            accuracy: None,
            label: Vec::new(),
            features: vec![col.clone()],
            from: vec![self.name().to_string()],
            filter: None,
        };
        Ok(vec![
            self.mql(body)?,
            self.viz(VizDirective::ClusterScatter, format!("{k} clusters of {col} in {}", self.name()), 0),
        ])
    }

    fn predict(&self) -> Result<Vec<QueryPlan>> {
        let numeric = self.columns_of(ValueKind::is_numeric);
        let target = self
            .mentioned(&numeric)
            .into_iter()
            .next()
            .ok_or_else(|| self.gap("a numeric column named as the target"))?;
        let features = self.features_besides(&target, numeric);
        if features.is_empty() {
            return Err(self.gap("feature columns besides the target"));
        }
        let body = GenerateBody {
            display: true,
            task: MlTask::Prediction { target, over: None },
            using: None,
            accuracy: self.accuracy(),
            label: Vec::new(),
            features,
            from: vec![self.name().to_string()],
            filter: None,
        };
        Ok(vec![self.mql(body)?])
    }

    fn classify(&self) -> Result<Vec<QueryPlan>> {
        let text = self.columns_of(|k| k == ValueKind::Text);
        let (class, labels) = self
            .mentioned(&text)
            .into_iter()
            .find_map(|c| {
                let distinct: BTreeSet<String> =
                    self.table.column(&c)?.iter().filter_map(|v| v.as_str().map(str::to_string)).collect();
                (2..=MAX_CLASSES).contains(&distinct.len()).then(|| (c, distinct.into_iter().collect::<Vec<_>>()))
            })
            .ok_or_else(|| self.gap("a named text column with 2 to 64 classes"))?;
        let features = self.features_besides(&class, self.columns_of(ValueKind::is_numeric));
        if features.is_empty() {
            return Err(self.gap("feature columns besides the class"));
        }
        let body = GenerateBody {
            display: true,
            task: MlTask::Classification { labels, over: None },
            using: None,
            accuracy: self.accuracy(),
            label: vec![class],
            features,
            from: vec![self.name().to_string()],
            filter: None,
        };
        Ok(vec![self.mql(body)?])
    }

    /// Named columns other than `exclude`, else every `fallback` column.
    fn features_besides(&self, exclude: &str, fallback: Vec<String>) -> Vec<String> {
        let all: Vec<String> = self.table.column_names().map(str::to_string).collect();
        let named: Vec<String> = self.mentioned(&all).into_iter().filter(|c| c != exclude).collect();
        if named.is_empty() {
            fallback.into_iter().filter(|c| c != exclude).collect()
        } else {
            named
        }
    }

    /// `accuracy 0.8` (or `accuracy of 80%`) in the need.
    fn accuracy(&self) -> Option<f64> {
        let norm = normalize(&self.task.kappa);
        let at = norm.find("accuracy")?;
        let v: f64 = numeric_tokens(&self.task.kappa[self.task.kappa.to_lowercase().find("accuracy").unwrap_or(at)..])
            .first()?
            .parse()
            .ok()?;
        let p = if v > 1.0 { v / 100.0 } else { v };
        (p > 0.0 && p <= 1.0).then_some(p)
    }

    fn mql(&self, body: GenerateBody) -> Result<QueryPlan> {
        let text = MqlStatement { body: StatementBody::Generate(body), span: Span::new(0, 0) }.to_string();
        let stmt = parse_statement(&text).map_err(|e| PipelineError::Exec(e.to_string()))?;
        validate_mql(&stmt, &ExecContext::new(self.registry)).map_err(|e| PipelineError::Exec(e.to_string()))?;
        Ok(self.plan(PlanKind::Mql { statement: text }))
    }

    /// COUNT(*) of the rows whose text cell is named in the need (longest
    /// such value wins), or of every row.
    fn lookup(&self) -> Vec<QueryPlan> {
        let kappa_words = words(&self.task.kappa).len();
        let mut best: Option<(usize, String, String)> = None;
        for c in self.columns_of(|k| k == ValueKind::Text) {
            let mut seen = BTreeSet::new();
            for v in self.table.column(&c).unwrap_or(&[]) {
                let Some(s) = v.as_str() else { continue };
                let n = words(s).len();
                if n == 0 || n > kappa_words || !seen.insert(s) {
                    continue;
                }
                if mentions(&self.task.kappa, s) && best.as_ref().is_none_or(|b| s.len() > b.0) {
                    best = Some((s.len(), c.clone(), s.to_string()));
                }
            }
        }
        let mut agg = AggregationPlan::new(self.name());
        if let Some((_, col, value)) = best {
            agg =
                agg.filter(Condition::compare(Operand::Column(col), CmpOp::Eq, Operand::Literal(Literal::Text(value))));
        }
        vec![self.plan(PlanKind::Agg { plan: agg.aggregate(Aggregate::count_all()) })]
    }
}

fn mean_words(values: &[Value]) -> f64 {
    let texts: Vec<&str> = values.iter().filter_map(Value::as_str).collect();
    if texts.is_empty() {
        return 0.0;
    }
    texts.iter().map(|s| words(s).len() as f64).sum::<f64>() / texts.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    fn setup() -> (tempfile::TempDir, Registry) {
        let dir = tempfile::tempdir().unwrap();
        let paths = fixture::generate(120, 7).write(dir.path()).unwrap();
        let reg = Registry::open(&paths.manifest).unwrap();
        (dir, reg)
    }

    fn bind(table: &str) -> Binding {
        Binding { ordinal: 1, table: table.into(), score: 1.0, runner_up: None }
    }

    #[test]
    fn intents_translate_to_expected_plans() {
        let (_d, reg) = setup();
        let rules = IntentRules::builtin();
        let q = Task::query("count incidents per month and plot trend", 2);
        let plans = translate(&q, Some(&bind("ProthomAlo")), &reg, &rules, 3).unwrap();
        assert!(
            matches!(&plans[0].kind, PlanKind::Agg { plan } if plan.group_by == [GroupKey::Month("last-published-at".into())])
        );
        assert!(matches!(&plans[1].kind, PlanKind::Viz { input: 3, directive: VizDirective::TrendLine { .. }, .. }));

        let q = Task::query("count per district and draw hotspot map", 2);
        let plans = translate(&q, Some(&bind("ProthomAlo")), &reg, &rules, 0).unwrap();
        assert!(
            matches!(&plans[1].kind, PlanKind::Viz { directive: VizDirective::Choropleth { region_column, .. }, .. } if region_column == "district-tag")
        );

        let q = Task::query("top 3 categories of headlines", 2);
        let plans = translate(&q, Some(&bind("ProthomAlo")), &reg, &rules, 0).unwrap();
        assert_eq!(
            plans[0].kind,
            PlanKind::Mql {
                statement: "GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;"
                    .into()
            }
        );

        let q = Task::query("sum cases per year and plot annual trend", 2);
        let plans = translate(&q, Some(&bind("NGORep")), &reg, &rules, 0).unwrap();
        assert!(matches!(&plans[0].kind, PlanKind::Agg { plan } if plan.filter.is_some()));
    }

    #[test]
    fn missing_binding_and_schema_gaps() {
        let (_d, reg) = setup();
        let rules = IntentRules::builtin();
        let q = Task::query("count incidents per month and plot trend", 1);
        assert!(matches!(translate(&q, None, &reg, &rules, 0), Err(PipelineError::Ordering { ordinal: 1, .. })));
        assert!(matches!(
            translate(&q, Some(&bind("NGORep")), &reg, &rules, 0),
            Err(PipelineError::SchemaGap { ref intent, .. }) if intent == "trend"
        ));
        let q = Task::query("top 3 categories of headlines", 1);
        assert!(matches!(translate(&q, Some(&bind("NGORep")), &reg, &rules, 0), Err(PipelineError::SchemaGap { .. })));
    }

    #[test]
    fn lookup_filters_on_a_named_value() {
        let (_d, reg) = setup();
        let q = Task::query("how many reports from Dhaka", 2);
        let plans = translate(&q, Some(&bind("ProthomAlo")), &reg, &IntentRules::builtin(), 0).unwrap();
        match &plans[0].kind {
            PlanKind::Agg { plan } => {
                assert_eq!(plan.filter.as_ref().unwrap().to_string(), "\"district-tag\" = 'Dhaka'")
            }
            other => panic!("{other:?}"),
        }
    }
}
