//! Turning table columns into a dense numeric matrix.
//!
//! Numeric and temporal columns are z-scored, low-cardinality text is
//! one-hot encoded and free text is TF-IDF weighted. The fitted
//! [`FeatureEncoder`] is stored with a model so unseen rows are transformed
//! exactly like the training rows.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use super::error::{MlError, Result};
use crate::store::{Table, Value, ValueKind};

/// Text columns with more distinct values than this are TF-IDF encoded.
pub const ONE_HOT_LIMIT: usize = 64;
/// Text whose values average at least this many words is treated as prose
/// and TF-IDF encoded whatever its cardinality.
pub const PROSE_MIN_WORDS: f64 = 3.0;
/// Terms must occur at least this many times across the corpus.
pub const MIN_TERM_FREQUENCY: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Encoding {
    Numeric,
    OneHot(String),
    Tfidf(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub column: String,
    pub encoding: Encoding,
}

/// Dense row-major matrix with one provenance entry per column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
    provenance: Vec<Provenance>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>, provenance: Vec<Provenance>) -> Result<FeatureMatrix> {
        let n_cols = provenance.len();
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(MlError::Feature(format!("row {i} has {} values, expected {n_cols}", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(MlError::Feature(format!("row {i} has a non-finite value")));
            }
            data.extend(row);
        }
        Ok(FeatureMatrix { n_rows, n_cols, data, provenance })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows).map(|i| self.row(i))
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix { n_rows: indices.len(), n_cols: self.n_cols, data, provenance: self.provenance.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "encoding", rename_all = "snake_case")]
pub enum ColumnEncoder {
    Numeric { column: String, mean: f64, std: f64 },
    OneHot { column: String, categories: Vec<String> },
    Tfidf { column: String, vocabulary: Vec<String>, idf: Vec<f64> },
}

impl ColumnEncoder {
    pub fn column(&self) -> &str {
        match self {
            ColumnEncoder::Numeric { column, .. }
            | ColumnEncoder::OneHot { column, .. }
            | ColumnEncoder::Tfidf { column, .. } => column,
        }
    }

    fn width(&self) -> usize {
        match self {
            ColumnEncoder::Numeric { .. } => 1,
            ColumnEncoder::OneHot { categories, .. } => categories.len(),
            ColumnEncoder::Tfidf { vocabulary, .. } => vocabulary.len(),
        }
    }

    fn provenance(&self) -> Vec<Provenance> {
        let column = self.column().to_string();
        match self {
            ColumnEncoder::Numeric { .. } => vec![Provenance { column, encoding: Encoding::Numeric }],
            ColumnEncoder::OneHot { categories, .. } => categories
                .iter()
                .map(|c| Provenance { column: column.clone(), encoding: Encoding::OneHot(c.clone()) })
                .collect(),
            ColumnEncoder::Tfidf { vocabulary, .. } => vocabulary
                .iter()
                .map(|t| Provenance { column: column.clone(), encoding: Encoding::Tfidf(t.clone()) })
                .collect(),
        }
    }

    /// Writes this column's encoding of `cells` into `out` (one slice per row).
    fn encode(&self, cells: &[Value], out: &mut [Vec<f64>]) {
        match self {
            ColumnEncoder::Numeric { mean, std, .. } => {
                for (row, cell) in out.iter_mut().zip(cells) {
                    let z = match numeric_value(cell) {
                        Some(x) if *std > 0.0 => (x - mean) / std,
                        _ => 0.0,
                    };
                    row.push(z);
                }
            }
            ColumnEncoder::OneHot { categories, .. } => {
                for (row, cell) in out.iter_mut().zip(cells) {
                    let hit = text_value(cell).and_then(|s| categories.binary_search(&s).ok());
                    row.extend((0..categories.len()).map(|j| if Some(j) == hit { 1.0 } else { 0.0 }));
                }
            }
            ColumnEncoder::Tfidf { vocabulary, idf, .. } => {
                for (row, cell) in out.iter_mut().zip(cells) {
                    let mut v = vec![0.0; vocabulary.len()];
                    if let Some(s) = text_value(cell) {
                        for tok in tokenize(&s) {
                            if let Ok(j) = vocabulary.binary_search(&tok) {
                                v[j] += 1.0;
                            }
                        }
                    }
                    for (x, w) in v.iter_mut().zip(idf) {
                        *x *= w;
                    }
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        v.iter_mut().for_each(|x| *x /= norm);
                    }
                    row.extend(v);
                }
            }
        }
    }
}

/// Fitted per-column encoders, in feature order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    pub columns: Vec<ColumnEncoder>,
}

impl FeatureEncoder {
    pub fn feature_columns(&self) -> Vec<&str> {
        self.columns.iter().map(ColumnEncoder::column).collect()
    }

    pub fn width(&self) -> usize {
        self.columns.iter().map(ColumnEncoder::width).sum()
    }

    /// Provenance of every output column, in matrix order.
    pub fn provenance(&self) -> Vec<Provenance> {
        self.columns.iter().flat_map(ColumnEncoder::provenance).collect()
    }

    /// Encodes `table` with this fitted state.
    pub fn transform(&self, table: &Table) -> Result<FeatureMatrix> {
        let mut rows = vec![Vec::with_capacity(self.width()); table.row_count()];
        let mut provenance = Vec::new();
        for enc in &self.columns {
            let cells = table
                .column(enc.column())
                .ok_or_else(|| MlError::Schema { table: table.name().to_string(), column: enc.column().to_string() })?;
            enc.encode(cells, &mut rows);
            provenance.extend(enc.provenance());
        }
        FeatureMatrix::from_rows(rows, provenance)
    }
}

/// Lowercased Unicode words.
pub fn tokenize(text: &str) -> Vec<String> {
    text.unicode_words().map(str::to_lowercase).collect()
}

/// Fits an encoder on `columns` of `table` (unless one is supplied) and
/// encodes the table.
pub fn build_features(
    table: &Table,
    columns: &[String],
    encoder: Option<&FeatureEncoder>,
) -> Result<(FeatureMatrix, FeatureEncoder)> {
    if table.row_count() == 0 {
        return Err(MlError::Feature(format!("table {} has no rows", table.name())));
    }
    let encoder = match encoder {
        Some(e) => e.clone(),
        None => fit_encoder(table, columns)?,
    };
    let matrix = encoder.transform(table)?;
    Ok((matrix, encoder))
}

fn fit_encoder(table: &Table, columns: &[String]) -> Result<FeatureEncoder> {
    if columns.is_empty() {
        return Err(MlError::Feature("no feature columns".into()));
    }
    let mut encoders = Vec::new();
    for name in columns {
        let idx = table
            .column_index(name)
            .ok_or_else(|| MlError::Schema { table: table.name().to_string(), column: name.clone() })?;
        let spec = &table.schema()[idx];
        let cells = table.column_at(idx);
        if cells.iter().all(Value::is_null) {
            return Err(MlError::Feature(format!("column `{}` has only nulls", spec.name)));
        }
        let column = spec.name.clone();
        let enc = if spec.kind == ValueKind::Text {
            let distinct: BTreeSet<String> = cells.iter().filter_map(text_value).collect();
            let present: Vec<&str> = cells.iter().filter_map(Value::as_str).collect();
            let mean_words =
                present.iter().map(|t| t.unicode_words().count()).sum::<usize>() as f64 / present.len().max(1) as f64;
            if distinct.len() <= ONE_HOT_LIMIT && mean_words < PROSE_MIN_WORDS {
                ColumnEncoder::OneHot { column, categories: distinct.into_iter().collect() }
            } else {
                fit_tfidf(column, cells)
            }
        } else {
            let xs: Vec<f64> = cells.iter().filter_map(numeric_value).collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            ColumnEncoder::Numeric { column, mean, std: var.sqrt() }
        };
        encoders.push(enc);
    }
    Ok(FeatureEncoder { columns: encoders })
}

/// Fits a TF-IDF encoder on one text column regardless of its cardinality.
pub fn fit_tfidf(column: impl Into<String>, cells: &[Value]) -> ColumnEncoder {
    let column = column.into();
    let docs: Vec<Vec<String>> =
        cells.iter().map(|c| text_value(c).map(|s| tokenize(&s)).unwrap_or_default()).collect();
    let mut total: BTreeMap<&str, usize> = BTreeMap::new();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in &docs {
        let mut seen = BTreeSet::new();
        for t in doc {
            *total.entry(t).or_default() += 1;
            if seen.insert(t.as_str()) {
                *df.entry(t).or_default() += 1;
            }
        }
    }
    let n = docs.len() as f64;
    let vocabulary: Vec<String> =
        total.iter().filter(|(_, &c)| c >= MIN_TERM_FREQUENCY).map(|(t, _)| t.to_string()).collect();
    let idf = vocabulary.iter().map(|t| ((1.0 + n) / (1.0 + df[t.as_str()] as f64)).ln() + 1.0).collect();
    ColumnEncoder::Tfidf { column, vocabulary, idf }
}

/// Numeric view of a cell; temporal values become seconds since the epoch.
fn numeric_value(v: &Value) -> Option<f64> {
    match v {
        Value::Int(_) | Value::Decimal(_) => v.as_f64(),
        Value::Date(_) | Value::Timestamp(_) => v.as_timestamp().map(|ts| ts.and_utc().timestamp() as f64),
        _ => None,
    }
}

fn text_value(v: &Value) -> Option<String> {
    match v {
        Value::Text(s) => Some(s.clone()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::ColumnSpec;

    fn one_col(kind: ValueKind, cells: Vec<Value>) -> Table {
        Table::new("t", vec![ColumnSpec::new("c", kind)], vec![cells]).unwrap()
    }

    #[test]
    fn zscore_and_constant() {
        let t = one_col(ValueKind::Int, vec![Value::Int(1), Value::Int(2), Value::Int(3)]);
        let (m, _) = build_features(&t, &["c".into()], None).unwrap();
        let z = 1.5f64.sqrt();
        for (got, want) in (0..3).map(|i| m.get(i, 0)).zip([-z, 0.0, z]) {
            assert!((got - want).abs() < 1e-9);
        }
        let t = one_col(ValueKind::Int, vec![Value::Int(5); 3]);
        let (m, _) = build_features(&t, &["c".into()], None).unwrap();
        assert_eq!((0..3).map(|i| m.get(i, 0)).collect::<Vec<_>>(), vec![0.0; 3]);
    }

    #[test]
    fn one_hot_with_unseen_category() {
        let t = one_col(ValueKind::Text, vec![Value::text("b"), Value::text("a"), Value::Null]);
        let (m, enc) = build_features(&t, &["c".into()], None).unwrap();
        assert_eq!(m.row(0), &[0.0, 1.0]);
        assert_eq!(m.row(2), &[0.0, 0.0]);
        let other = one_col(ValueKind::Text, vec![Value::text("zzz")]);
        let (m2, _) = build_features(&other, &["c".into()], Some(&enc)).unwrap();
        assert_eq!(m2.row(0), &[0.0, 0.0]);
    }

    #[test]
    fn errors() {
        let empty = one_col(ValueKind::Int, vec![]);
        assert!(matches!(build_features(&empty, &["c".into()], None), Err(MlError::Feature(_))));
        let nulls = one_col(ValueKind::Int, vec![Value::Null, Value::Null]);
        assert!(matches!(build_features(&nulls, &["c".into()], None), Err(MlError::Feature(_))));
        let t = one_col(ValueKind::Int, vec![Value::Int(1)]);
        assert!(matches!(build_features(&t, &["zz".into()], None), Err(MlError::Schema { .. })));
    }

    #[test]
    fn bangla_tokens() {
        assert_eq!(tokenize("ঢাকায় শিশু ধর্ষণ, গ্রেপ্তার!"), vec!["ঢাকায়", "শিশু", "ধর্ষণ", "গ্রেপ্তার"]);
        assert_eq!(tokenize("Girl RAPED in Dhaka"), vec!["girl", "raped", "in", "dhaka"]);
    }
}
