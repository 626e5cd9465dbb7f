//! The MQL executor: binds a statement to registered tables and dispatches
//! to training, model application, the model store or cleaning directives.

use super::error::{ExecError, MlError, Result};
use super::knn::DEFAULT_K;
use super::model::{
    apply_model, clustering_result, gate_accuracy, resolve_algorithm, train_classifier, train_clusterer,
    train_predictor, MlResult, TaskKind, TrainedModel,
};
use super::store::ModelStore;
use crate::mql::{GenerateBody, MlTask, MqlStatement, StatementBody, Using};
use crate::store::{apply_inspect, evaluate_int_expr, filter_table, Registry, Table};

/// Everything a statement may touch.
#[derive(Debug, Clone, Copy)]
pub struct ExecContext<'a> {
    pub registry: &'a Registry,
    pub models: Option<&'a ModelStore>,
    pub seed: u64,
    /// Neighbour count for classification.
    pub knn_k: usize,
}

impl<'a> ExecContext<'a> {
    pub fn new(registry: &'a Registry) -> Self {
        ExecContext { registry, models: None, seed: 42, knn_k: DEFAULT_K }
    }

    pub fn with_models(mut self, models: &'a ModelStore) -> Self {
        self.models = Some(models);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

// one value per statement, so variant size does not matter
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum Execution {
    /// GENERATE: model output over the applied table.
    Ml(MlResult),
    /// CONSTRUCT: the model that was trained and stored.
    Model(TrainedModel),
    /// INSPECT: the cleaned table.
    Table(Table),
}

impl Execution {
    /// The table a reader would want to see first.
    pub fn primary_table(&self) -> Table {
        match self {
            Execution::Ml(r) => r.table.clone(),
            Execution::Model(m) => m.metadata_table(),
            Execution::Table(t) => t.clone(),
        }
    }
}

pub fn execute_mql(stmt: &MqlStatement, ctx: &ExecContext<'_>) -> Result<Execution, ExecError> {
    let run = || -> Result<Execution> {
        match &stmt.body {
            StatementBody::Generate(body) => generate(body, ctx).map(Execution::Ml),
            StatementBody::Construct(c) => {
                let store = ctx.models.ok_or_else(|| MlError::ModelStore("no model store is configured".into()))?;
                super::store::validate_model_name(&c.model)?;
                let data = bind_from(&c.body, ctx)?;
                let (model, _) = train(&c.body, &data, ctx)?;
                if let Some(p) = c.body.accuracy {
                    gate_accuracy(&model, p)?;
                }
                let model = model.with_name(&c.model);
                store.save(&model)?;
                Ok(Execution::Model(model))
            }
            StatementBody::Inspect(i) => {
                let table = ctx.registry.table(&i.table)?;
                Ok(Execution::Table(apply_inspect(&table, &i.directives)?))
            }
        }
    };
    run().map_err(|error| ExecError { span: stmt.span, error })
}

/// Checks a statement against the registry without running it: every
/// table exists, every referenced column binds, and the algorithm is known.
pub fn validate_mql(stmt: &MqlStatement, ctx: &ExecContext<'_>) -> Result<(), ExecError> {
    let check_body = |body: &GenerateBody| -> Result<()> {
        let kind = task_kind(&body.task);
        if let Some(Using::Algorithm(a)) = &body.using {
            resolve_algorithm(kind, Some(a))?;
        }
        let mut tables = Vec::new();
        for name in &body.from {
            tables.push(ctx.registry.table(name)?);
        }
        if let Some(over) = body.task.over() {
            ctx.registry.table(over)?;
        }
        let first = tables.first().ok_or_else(|| MlError::Invalid("FROM names no table".into()))?;
        let mut columns: Vec<&str> = body.features.iter().chain(&body.label).map(String::as_str).collect();
        if let MlTask::Prediction { target, .. } = &body.task {
            columns.push(target);
        }
        if let Some(cond) = &body.filter {
            columns.extend(cond.columns());
        }
        for c in columns {
            first.resolve(c)?;
        }
        Ok(())
    };
    let run = || -> Result<()> {
        match &stmt.body {
            StatementBody::Generate(body) => check_body(body),
            StatementBody::Construct(c) => {
                super::store::validate_model_name(&c.model)?;
                check_body(&c.body)
            }
            StatementBody::Inspect(i) => {
                let table = ctx.registry.table(&i.table)?;
                for d in &i.directives {
                    match d {
                        crate::mql::InspectDirective::DropNull(c) | crate::mql::InspectDirective::FillNull(c, _) => {
                            table.resolve(c)?;
                        }
                        crate::mql::InspectDirective::Dedupe => {}
                    }
                }
                Ok(())
            }
        }
    };
    run().map_err(|error| ExecError { span: stmt.span, error })
}

/// The FROM tables combined, before and after WHERE.
struct Bound {
    all: Table,
    filtered: Table,
}

fn bind_from(body: &GenerateBody, ctx: &ExecContext<'_>) -> Result<Bound> {
    let mut tables = body.from.iter().map(|name| ctx.registry.table(name));
    let first = tables.next().ok_or_else(|| MlError::Invalid("FROM names no table".into()))??;
    let mut all = (*first).clone();
    for t in tables {
        all = all.union(&*t?)?;
    }
    for c in body.features.iter().chain(&body.label) {
        all.resolve(c)?;
    }
    let filtered = match &body.filter {
        Some(cond) => filter_table(&all, cond)?,
        None => all.clone(),
    };
    Ok(Bound { all, filtered })
}

fn task_kind(task: &MlTask) -> TaskKind {
    match task {
        MlTask::Prediction { .. } => TaskKind::Prediction,
        MlTask::Classification { .. } => TaskKind::Classification,
        MlTask::Cluster { .. } => TaskKind::Cluster,
    }
}

fn feature_columns(body: &GenerateBody) -> Vec<String> {
    body.features.iter().filter(|f| !body.label.iter().any(|l| l.eq_ignore_ascii_case(f))).cloned().collect()
}

/// Trains the model a GENERATE/CONSTRUCT body describes. Clustering also
/// returns the fresh result over the training rows.
fn train(body: &GenerateBody, data: &Bound, ctx: &ExecContext<'_>) -> Result<(TrainedModel, Option<MlResult>)> {
    let kind = task_kind(&body.task);
    let algorithm = match &body.using {
        Some(Using::Algorithm(a)) => Some(a.as_str()),
        _ => None,
    };
    resolve_algorithm(kind, algorithm)?;
    let features = feature_columns(body);
    match &body.task {
        MlTask::Prediction { target, .. } => Ok((train_predictor(&data.filtered, &features, target, ctx.seed)?, None)),
        MlTask::Classification { labels, .. } => {
            let class_column = class_column(body, &data.filtered, labels)?;
            let model = train_classifier(&data.filtered, &features, &class_column, labels, ctx.seed, ctx.knn_k)?;
            Ok((model, None))
        }
        MlTask::Cluster { k } => {
            let k = evaluate_int_expr(k, &data.all)?;
            if k < 1 {
                return Err(MlError::Invalid(format!("cluster count evaluated to {k}; it must be at least 1")));
            }
            let (model, clustering, x) = train_clusterer(&data.filtered, &features, k as usize, ctx.seed)?;
            let result = clustering_result(model.clone(), clustering, x, &data.filtered, &body.label)?;
            Ok((model, Some(result)))
        }
    }
}

/// The column holding the classes: the first LABEL, then FEATURES, column
/// whose values include any declared class.
fn class_column(body: &GenerateBody, table: &Table, labels: &[String]) -> Result<String> {
    for c in body.label.iter().chain(&body.features) {
        let idx = table.resolve(c)?;
        if table.column_at(idx).iter().any(|v| !v.is_null() && labels.contains(&v.to_string())) {
            return Ok(table.schema()[idx].name.clone());
        }
    }
    Err(MlError::Invalid(format!("no LABEL or FEATURES column contains any of the classes {}", labels.join(", "))))
}

fn generate(body: &GenerateBody, ctx: &ExecContext<'_>) -> Result<MlResult> {
    let kind = task_kind(&body.task);
    let data = bind_from(body, ctx)?;
    let mut warnings = Vec::new();
    if body.accuracy.is_some() && kind == TaskKind::Cluster {
        warnings.push("WITH MODEL ACCURACY is ignored for clustering, which has no ground truth".to_string());
    }
    let over = match body.task.over() {
        Some(name) => Some(ctx.registry.table(name)?),
        None => None,
    };
    let target: &Table = over.as_deref().unwrap_or(&data.filtered);

    let mut result = match &body.using {
        Some(Using::Model(name)) => {
            let store = ctx.models.ok_or_else(|| MlError::ModelStore("no model store is configured".into()))?;
            let model = store.load(name)?;
            if model.task != kind {
                return Err(MlError::Invalid(format!(
                    "model `{name}` was built for {}, not {}",
                    model.task.name(),
                    kind.name()
                )));
            }
            if !body.features.is_empty() && feature_columns(body) != model.feature_columns() {
                warnings.push(format!(
                    "model `{name}` uses its stored features ({}); the FEATURES list was not used",
                    model.feature_columns().join(", ")
                ));
            }
            gate(&model, body, kind)?;
            apply_model(&model, target, &body.label)?
        }
        _ => {
            let (model, fresh) = train(body, &data, ctx)?;
            gate(&model, body, kind)?;
            match fresh {
                Some(r) if over.is_none() => r,
                _ => apply_model(&model, target, &body.label)?,
            }
        }
    };
    result.warnings.extend(warnings);
    Ok(result)
}

fn gate(model: &TrainedModel, body: &GenerateBody, kind: TaskKind) -> Result<()> {
    match body.accuracy {
        Some(p) if kind != TaskKind::Cluster => gate_accuracy(model, p),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mql::parse_statement;
    use crate::store::{ColumnSpec, Value, ValueKind};

    fn registry() -> Registry {
        let reg = Registry::new();
        let line = Table::from_rows(
            "line",
            vec![
                ColumnSpec::new("id", ValueKind::Int),
                ColumnSpec::new("x", ValueKind::Int),
                ColumnSpec::new("y", ValueKind::Int),
            ],
            (0..10).map(|x| vec![Value::Int(100 + x), Value::Int(x), Value::Int(2 * x + 1)]).collect(),
        )
        .unwrap();
        reg.register(line, "noiseless line").unwrap();
        let probe = Table::from_rows(
            "probe",
            vec![ColumnSpec::new("id", ValueKind::Int), ColumnSpec::new("x", ValueKind::Int)],
            vec![vec![Value::Int(1), Value::Int(10)], vec![Value::Int(2), Value::Int(-1)]],
        )
        .unwrap();
        reg.register(probe, "points to predict").unwrap();
        reg
    }

    fn run(reg: &Registry, models: Option<&ModelStore>, q: &str) -> Result<Execution, ExecError> {
        let stmt = parse_statement(q).unwrap();
        let mut ctx = ExecContext::new(reg);
        ctx.models = models;
        execute_mql(&stmt, &ctx)
    }

    #[test]
    fn predict_with_gate_and_over() {
        let reg = registry();
        let out =
            run(&reg, None, "GENERATE PREDICTION y OVER probe WITH MODEL ACCURACY 0.5 LABEL id FEATURES x FROM line;")
                .unwrap();
        let Execution::Ml(r) = out else { panic!() };
        assert_eq!(r.table.column_names().collect::<Vec<_>>(), ["id", "y"]);
        assert!((r.table.cell(0, 1).as_f64().unwrap() - 21.0).abs() < 1e-6);
        assert!((r.table.cell(1, 1).as_f64().unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn construct_then_use_matches_direct() {
        let reg = registry();
        let dir = tempfile::tempdir().unwrap();
        let store = ModelStore::new(dir.path());
        let built = run(&reg, Some(&store), "CONSTRUCT MODEL m1 AS PREDICTION y FEATURES x FROM line;").unwrap();
        assert!(matches!(built, Execution::Model(_)));
        let Execution::Ml(via_model) =
            run(&reg, Some(&store), "GENERATE PREDICTION y OVER probe USING MODEL m1 FROM line;").unwrap()
        else {
            panic!()
        };
        let Execution::Ml(direct) = run(&reg, None, "GENERATE PREDICTION y OVER probe FEATURES x FROM line;").unwrap()
        else {
            panic!()
        };
        assert_eq!(via_model.table, direct.table);
    }

    #[test]
    fn errors_carry_span() {
        let reg = registry();
        let err = run(&reg, None, "GENERATE PREDICTION y FEATURES nope FROM line;").unwrap_err();
        assert!(matches!(err.error, MlError::Store(_)));
        assert_eq!(err.span.start, 0);
        let err = run(&reg, None, "GENERATE CLUSTER OF 3 USING ALGORITHM DBSCAN FEATURES x FROM line;").unwrap_err();
        assert!(matches!(err.error, MlError::UnknownAlgorithm { .. }));
        let err = run(&reg, None, "GENERATE PREDICTION y USING MODEL m FROM line;").unwrap_err();
        assert!(matches!(err.error, MlError::ModelStore(_)));
    }

    #[test]
    fn cluster_k_from_aggregate_and_accuracy_warning() {
        let reg = registry();
        let out =
            run(&reg, None, "GENERATE CLUSTER OF COUNT(*) / 5 WITH MODEL ACCURACY 0.9 FEATURES x FROM line;").unwrap();
        let Execution::Ml(r) = out else { panic!() };
        assert_eq!(r.clustering.as_ref().unwrap().k, 2);
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.summary.row_count(), 2);
    }
}
