//! Training, applying and gating models for the three task kinds.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::error::{MlError, Result};
use super::features::{build_features, ColumnEncoder, Encoding, FeatureEncoder, FeatureMatrix};
use super::kmeans::{kmeans, nearest_centroid, squared_distance, Clustering};
use super::knn::KnnModel;
use super::regression::{fit_ols, r_squared, LinearModel};
use crate::store::{ColumnSpec, Table, Value, ValueKind};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Prediction,
    Classification,
    Cluster,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Prediction => "prediction",
            TaskKind::Classification => "classification",
            TaskKind::Cluster => "cluster",
        }
    }
}

pub struct AlgorithmInfo {
    pub name: &'static str,
    pub task: TaskKind,
    pub aliases: &'static [&'static str],
}

/// Every supported algorithm; the first entry per task is its default.
pub const ALGORITHMS: &[AlgorithmInfo] = &[
    AlgorithmInfo { name: "KMeans", task: TaskKind::Cluster, aliases: &["k-means", "kmeans"] },
    AlgorithmInfo { name: "OLS", task: TaskKind::Prediction, aliases: &["linearregression", "linear"] },
    AlgorithmInfo { name: "KNN", task: TaskKind::Classification, aliases: &["k-nn", "knearestneighbors"] },
];

/// Canonical algorithm name for `task`, defaulting when `name` is absent.
/// Matching is case-insensitive.
pub fn resolve_algorithm(task: TaskKind, name: Option<&str>) -> Result<&'static str> {
    let candidates = ALGORITHMS.iter().filter(|a| a.task == task);
    let Some(name) = name else {
        return Ok(candidates.clone().next().expect("every task has an algorithm").name);
    };
    let lower = name.to_lowercase();
    candidates
        .clone()
        .find(|a| a.name.eq_ignore_ascii_case(name) || a.aliases.contains(&lower.as_str()))
        .map(|a| a.name)
        .ok_or_else(|| MlError::UnknownAlgorithm {
            name: name.to_string(),
            task: task.name(),
            supported: candidates.map(|a| a.name).collect::<Vec<_>>().join(", "),
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Centroids {
        centroids: Vec<Vec<f64>>,
    },
    Neighbors(KnnModel),
    Linear {
        /// Weights over the standardized feature matrix.
        fitted: LinearModel,
        /// The same model expressed in the units of the raw columns.
        coefficients: Vec<f64>,
        intercept: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub dataset: String,
    pub rows: usize,
    pub seed: u64,
    /// Holdout accuracy in `[0, 1]`; absent for clustering.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub name: String,
    pub task: TaskKind,
    pub algorithm: String,
    /// Prediction target or class column.
    pub target: Option<String>,
    /// Declared class labels, in tie-break order.
    pub labels: Vec<String>,
    pub encoder: FeatureEncoder,
    pub params: ModelParams,
    pub meta: TrainingMeta,
}

impl TrainedModel {
    pub fn feature_columns(&self) -> Vec<&str> {
        self.encoder.feature_columns()
    }

    pub fn with_name(mut self, name: &str) -> TrainedModel {
        self.name = name.to_string();
        self
    }

    /// Property/value rows describing the model.
    pub fn metadata_table(&self) -> Table {
        let mut rows = vec![
            ("name", self.name.clone()),
            ("task", self.task.name().to_string()),
            ("algorithm", self.algorithm.clone()),
            ("features", self.feature_columns().join(", ")),
            ("dataset", self.meta.dataset.clone()),
            ("rows", self.meta.rows.to_string()),
            ("seed", self.meta.seed.to_string()),
        ];
        if let Some(t) = &self.target {
            rows.push(("target", t.clone()));
        }
        if !self.labels.is_empty() {
            rows.push(("labels", self.labels.join(", ")));
        }
        if let Some(a) = self.meta.accuracy {
            rows.push(("holdout_accuracy", crate::store::format_number(a)));
        }
        Table::from_rows(
            "model",
            vec![ColumnSpec::new("property", ValueKind::Text), ColumnSpec::new("value", ValueKind::Text)],
            rows.into_iter().map(|(k, v)| vec![Value::text(k), Value::text(v)]).collect(),
        )
        .expect("metadata schema is fixed")
    }
}

/// Seeded 80/20 split of `0..n` into (train, test), each in ascending order.
pub fn holdout_split(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    if n < 2 {
        return (idx, Vec::new());
    }
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = ((n as f64 * 0.2).round() as usize).clamp(1, n - 1);
    let mut test = idx[..n_test].to_vec();
    let mut train = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    (train, test)
}

fn without(columns: &[String], drop: &str) -> Vec<String> {
    columns.iter().filter(|c| !c.eq_ignore_ascii_case(drop)).cloned().collect()
}

/// Least-squares model of numeric `target` from `features`, fitted on the
/// training part of a seeded holdout split. Rows with a null target are
/// skipped.
pub fn train_predictor(table: &Table, features: &[String], target: &str, seed: u64) -> Result<TrainedModel> {
    let t_idx = table.resolve(target)?;
    let t_spec = &table.schema()[t_idx];
    if !t_spec.kind.is_numeric() {
        return Err(MlError::Invalid(format!(
            "prediction target `{}` must be numeric, found {}",
            t_spec.name, t_spec.kind
        )));
    }
    let keep: Vec<usize> = (0..table.row_count()).filter(|&r| !table.cell(r, t_idx).is_null()).collect();
    if keep.len() < 2 {
        return Err(MlError::Invalid(format!("prediction needs at least 2 rows with a `{}` value", t_spec.name)));
    }
    let data = table.take_rows(&keep);
    let y: Vec<f64> = data.column_at(t_idx).iter().map(|v| v.as_f64().expect("non-null numeric")).collect();
    let (x, encoder) = build_features(&data, &without(features, &t_spec.name), None)?;

    let (train, test) = holdout_split(data.row_count(), seed);
    let pick = |idx: &[usize]| idx.iter().map(|&i| y[i]).collect::<Vec<f64>>();
    let fitted = fit_ols(&x.select_rows(&train), &pick(&train))?;
    let accuracy = r_squared(&pick(&test), &fitted.predict(&x.select_rows(&test))).max(0.0);

    let (coefficients, intercept) = raw_coefficients(&fitted, &encoder);
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        name: String::new(),
        task: TaskKind::Prediction,
        algorithm: "OLS".into(),
        target: Some(t_spec.name.clone()),
        labels: Vec::new(),
        encoder,
        params: ModelParams::Linear { fitted, coefficients, intercept },
        meta: TrainingMeta {
            dataset: table.name().to_string(),
            rows: data.row_count(),
            seed,
            accuracy: Some(accuracy),
        },
    })
}

/// Undoes the z-scoring of numeric columns so weights read in raw units.
fn raw_coefficients(model: &LinearModel, encoder: &FeatureEncoder) -> (Vec<f64>, f64) {
    let mut coefficients = Vec::with_capacity(model.weights.len());
    let mut intercept = model.intercept;
    let mut w = model.weights.iter();
    for enc in &encoder.columns {
        match enc {
            ColumnEncoder::Numeric { mean, std, .. } => {
                let wj = *w.next().expect("weight per column");
                if *std > 0.0 {
                    coefficients.push(wj / std);
                    intercept -= wj * mean / std;
                } else {
                    coefficients.push(0.0);
                }
            }
            ColumnEncoder::OneHot { categories: items, .. } | ColumnEncoder::Tfidf { vocabulary: items, .. } => {
                coefficients.extend(w.by_ref().take(items.len()));
            }
        }
    }
    (coefficients, intercept)
}

/// k-nearest-neighbour classifier over `class_column`, whose values must
/// all be among `labels`. Rows with a null class are skipped.
pub fn train_classifier(
    table: &Table,
    features: &[String],
    class_column: &str,
    labels: &[String],
    seed: u64,
    k: usize,
) -> Result<TrainedModel> {
    let c_idx = table.resolve(class_column)?;
    let c_name = table.schema()[c_idx].name.clone();
    let keep: Vec<usize> = (0..table.row_count()).filter(|&r| !table.cell(r, c_idx).is_null()).collect();
    let data = table.take_rows(&keep);
    let raw: Vec<String> = data.column_at(c_idx).iter().map(Value::to_string).collect();

    let offenders: BTreeSet<&str> = raw.iter().map(String::as_str).filter(|c| !labels.iter().any(|l| l == c)).collect();
    if !offenders.is_empty() {
        return Err(MlError::Invalid(format!(
            "classes outside the declared labels in `{c_name}`: {}",
            offenders.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    let present: BTreeSet<&str> = raw.iter().map(String::as_str).collect();
    if present.len() < 2 {
        return Err(MlError::Invalid(format!(
            "classification needs at least 2 classes in the training data, found {}",
            present.len()
        )));
    }
    let classes: Vec<usize> = raw.iter().map(|c| labels.iter().position(|l| l == c).expect("checked")).collect();
    let (x, encoder) = build_features(&data, &without(features, &c_name), None)?;

    let (train, test) = holdout_split(data.row_count(), seed);
    let pick = |idx: &[usize]| idx.iter().map(|&i| classes[i]).collect::<Vec<usize>>();
    let model = KnnModel::fit(&x.select_rows(&train), pick(&train), labels.to_vec(), k);
    let truth = pick(&test);
    let predicted = model.predict(&x.select_rows(&test));
    let correct = truth.iter().zip(&predicted).filter(|(a, b)| a == b).count();
    let accuracy = if truth.is_empty() { 0.0 } else { correct as f64 / truth.len() as f64 };

    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        name: String::new(),
        task: TaskKind::Classification,
        algorithm: "KNN".into(),
        target: Some(c_name),
        labels: labels.to_vec(),
        encoder,
        params: ModelParams::Neighbors(model),
        meta: TrainingMeta {
            dataset: table.name().to_string(),
            rows: data.row_count(),
            seed,
            accuracy: Some(accuracy),
        },
    })
}

/// Runs k-means over `features` and packages the centroids as a model.
pub fn train_clusterer(
    table: &Table,
    features: &[String],
    k: usize,
    seed: u64,
) -> Result<(TrainedModel, Clustering, FeatureMatrix)> {
    let (x, encoder) = build_features(table, features, None)?;
    let clustering = kmeans(&x, k, seed)?;
    let model = TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        name: String::new(),
        task: TaskKind::Cluster,
        algorithm: "KMeans".into(),
        target: None,
        labels: Vec::new(),
        encoder,
        params: ModelParams::Centroids { centroids: clustering.centroids.clone() },
        meta: TrainingMeta { dataset: table.name().to_string(), rows: table.row_count(), seed, accuracy: None },
    };
    Ok((model, clustering, x))
}

/// Passes when the stored holdout accuracy reaches `threshold`. Models
/// without an accuracy (clusterings) always pass.
pub fn gate_accuracy(model: &TrainedModel, threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(MlError::Invalid(format!("accuracy threshold {threshold} must lie strictly between 0 and 1")));
    }
    match model.meta.accuracy {
        Some(accuracy) if accuracy < threshold => Err(MlError::Accuracy { accuracy, threshold }),
        _ => Ok(()),
    }
}

/// Output of running a model over a table.
#[derive(Debug, Clone, PartialEq)]
pub struct MlResult {
    pub task: TaskKind,
    /// Label columns (or a `row` index) followed by the model output.
    pub table: Table,
    /// Per-cluster sizes, per-class counts or model coefficients.
    pub summary: Table,
    pub features: FeatureMatrix,
    pub clustering: Option<Clustering>,
    pub model: TrainedModel,
    pub warnings: Vec<String>,
}

/// Applies a trained model to every row of `table`, copying `label_columns`
/// through (or a `row` index when there are none).
pub fn apply_model(model: &TrainedModel, table: &Table, label_columns: &[String]) -> Result<MlResult> {
    let x = model.encoder.transform(table)?;
    let (out_name, out_kind, values, clustering) = match &model.params {
        ModelParams::Linear { fitted, .. } => {
            let y = fitted.predict(&x);
            let name = model.target.clone().unwrap_or_else(|| "prediction".into());
            (name, ValueKind::Decimal, y.into_iter().map(Value::decimal).collect::<Vec<_>>(), None)
        }
        ModelParams::Neighbors(knn) => {
            let c = knn.predict(&x);
            let v = c.into_iter().map(|i| Value::text(knn.labels[i].clone())).collect();
            ("class".to_string(), ValueKind::Text, v, None)
        }
        ModelParams::Centroids { centroids } => {
            let assignments: Vec<usize> = x.rows().map(|r| nearest_centroid(r, centroids)).collect();
            let inertia = x.rows().zip(&assignments).map(|(r, &a)| squared_distance(r, &centroids[a])).sum();
            let clustering = Clustering {
                k: centroids.len(),
                assignments: assignments.clone(),
                centroids: centroids.clone(),
                inertia,
                iterations: 0,
                inertia_history: vec![inertia],
            };
            let v = assignments.into_iter().map(|a| Value::Int(a as i64)).collect();
            ("cluster".to_string(), ValueKind::Int, v, Some(clustering))
        }
    };
    let output = output_table(table, label_columns, &out_name, out_kind, values)?;
    let summary = summary_table(model, &output, clustering.as_ref());
    Ok(MlResult {
        task: model.task,
        table: output,
        summary,
        features: x,
        clustering,
        model: model.clone(),
        warnings: Vec::new(),
    })
}

/// Result of a fresh clustering run, shaped like [`apply_model`] output.
pub fn clustering_result(
    model: TrainedModel,
    clustering: Clustering,
    features: FeatureMatrix,
    table: &Table,
    label_columns: &[String],
) -> Result<MlResult> {
    let values = clustering.assignments.iter().map(|&a| Value::Int(a as i64)).collect();
    let output = output_table(table, label_columns, "cluster", ValueKind::Int, values)?;
    let summary = summary_table(&model, &output, Some(&clustering));
    Ok(MlResult {
        task: TaskKind::Cluster,
        table: output,
        summary,
        features,
        clustering: Some(clustering),
        model,
        warnings: Vec::new(),
    })
}

fn output_table(
    table: &Table,
    labels: &[String],
    out_name: &str,
    out_kind: ValueKind,
    values: Vec<Value>,
) -> Result<Table> {
    let mut schema = Vec::new();
    let mut columns = Vec::new();
    if labels.is_empty() {
        schema.push(ColumnSpec::new("row", ValueKind::Int));
        columns.push((0..table.row_count()).map(|i| Value::Int(i as i64)).collect());
    }
    for l in labels {
        let idx = table
            .column_index(l)
            .ok_or_else(|| MlError::Schema { table: table.name().to_string(), column: l.clone() })?;
        schema.push(table.schema()[idx].clone());
        columns.push(table.column_at(idx).to_vec());
    }
    let mut name = out_name.to_string();
    while schema.iter().any(|s| s.name == name) {
        name = format!("predicted_{name}");
    }
    schema.push(ColumnSpec::new(name, out_kind));
    columns.push(values);
    Ok(Table::new(table.name(), schema, columns)?)
}

fn summary_table(model: &TrainedModel, output: &Table, clustering: Option<&Clustering>) -> Table {
    let out = output.column_at(output.column_count() - 1);
    match (&model.params, clustering) {
        (_, Some(c)) => {
            let sizes = c.sizes();
            let rows = (0..c.k)
                .map(|j| {
                    vec![
                        Value::Int(j as i64),
                        Value::Int(sizes[j] as i64),
                        Value::text(top_terms(model, &c.centroids[j], 3)),
                    ]
                })
                .collect();
            Table::from_rows(
                "clusters",
                vec![
                    ColumnSpec::new("cluster", ValueKind::Int),
                    ColumnSpec::new("size", ValueKind::Int),
                    ColumnSpec::new("top_terms", ValueKind::Text),
                ],
                rows,
            )
            .expect("fixed schema")
        }
        (ModelParams::Neighbors(knn), None) => {
            let rows = knn
                .labels
                .iter()
                .map(|l| {
                    let n = out.iter().filter(|v| v.as_str() == Some(l)).count();
                    vec![Value::text(l.clone()), Value::Int(n as i64)]
                })
                .collect();
            Table::from_rows(
                "classes",
                vec![ColumnSpec::new("class", ValueKind::Text), ColumnSpec::new("count", ValueKind::Int)],
                rows,
            )
            .expect("fixed schema")
        }
        (ModelParams::Linear { coefficients, intercept, .. }, None) => {
            let mut rows = vec![vec![Value::text("intercept"), Value::decimal(*intercept)]];
            for (p, c) in model.encoder.provenance().iter().zip(coefficients) {
                let term = match &p.encoding {
                    Encoding::Numeric => p.column.clone(),
                    Encoding::OneHot(v) => format!("{}={v}", p.column),
                    Encoding::Tfidf(t) => format!("{}:{t}", p.column),
                };
                rows.push(vec![Value::text(term), Value::decimal(*c)]);
            }
            if let Some(a) = model.meta.accuracy {
                rows.push(vec![Value::text("holdout_accuracy"), Value::decimal(a)]);
            }
            Table::from_rows(
                "coefficients",
                vec![ColumnSpec::new("term", ValueKind::Text), ColumnSpec::new("value", ValueKind::Decimal)],
                rows,
            )
            .expect("fixed schema")
        }
        (ModelParams::Centroids { .. }, None) => unreachable!("centroid models always produce a clustering"),
    }
}

/// Highest-weighted TF-IDF terms of a centroid, comma separated.
fn top_terms(model: &TrainedModel, centroid: &[f64], n: usize) -> String {
    let prov = model.encoder.provenance();
    let mut terms: Vec<(f64, &str)> = prov
        .iter()
        .zip(centroid)
        .filter_map(|(p, &w)| match &p.encoding {
            Encoding::Tfidf(t) if w > 0.0 => Some((w, t.as_str())),
            _ => None,
        })
        .collect();
    terms.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    terms.iter().take(n).map(|(_, t)| *t).collect::<Vec<_>>().join(", ")
}
