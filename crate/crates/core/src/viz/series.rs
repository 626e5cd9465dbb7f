use std::collections::HashSet;

use serde::Serialize;

use super::{Result, VizError};
use crate::store::Table;

/// Ordered `(key, value)` points with unique keys and finite values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(String, f64)>,
}

impl Series {
    pub fn new(name: &str, points: Vec<(String, f64)>) -> Result<Series> {
        let mut seen = HashSet::new();
        for (k, v) in &points {
            if !seen.insert(k.as_str()) {
                return Err(VizError::Invalid(format!("duplicate key {k:?} in series {name}")));
            }
            if !v.is_finite() {
                return Err(VizError::Invalid(format!("non-finite value at {k:?} in series {name}")));
            }
        }
        Ok(Series { name: name.to_string(), points })
    }

    /// Builds a series from two columns of a table, in row order. Rows with
    /// a null key or value are skipped.
    pub fn from_table(table: &Table, key: &str, value: &str) -> Result<Series> {
        let missing = |c: &str| VizError::Invalid(format!("table {} has no column `{c}`", table.name()));
        let k = table.column(key).ok_or_else(|| missing(key))?;
        let v = table.column(value).ok_or_else(|| missing(value))?;
        let points = k
            .iter()
            .zip(v)
            .filter(|(k, v)| !k.is_null() && !v.is_null())
            .map(|(k, v)| {
                v.as_f64()
                    .map(|x| (k.to_string(), x))
                    .ok_or_else(|| VizError::Invalid(format!("column `{value}` is not numeric")))
            })
            .collect::<Result<Vec<_>>>()?;
        Series::new(value, points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.points.iter().map(|p| p.1).reduce(f64::max)
    }

    pub fn min(&self) -> Option<f64> {
        self.points.iter().map(|p| p.1).reduce(f64::min)
    }

    pub(crate) fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "points": self.points.iter().map(|(k, v)| serde_json::json!({"key": k, "value": v})).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_nan() {
        assert!(Series::new("s", vec![("a".into(), 1.0), ("a".into(), 2.0)]).is_err());
        assert!(Series::new("s", vec![("a".into(), f64::NAN)]).is_err());
        assert_eq!(Series::new("s", vec![("a".into(), 1.0), ("b".into(), 3.0)]).unwrap().max(), Some(3.0));
    }
}
