use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::error::{Result, StoreError};
use super::value::{Value, ValueKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ValueKind,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, kind: ValueKind) -> Self {
        ColumnSpec { name: name.into(), kind }
    }
}

/// Immutable columnar table. Every column has exactly `row_count` cells,
/// and each non-null cell matches its column's declared kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    schema: Vec<ColumnSpec>,
    columns: Vec<Vec<Value>>,
    row_count: usize,
}

impl Table {
    pub fn new(name: impl Into<String>, schema: Vec<ColumnSpec>, columns: Vec<Vec<Value>>) -> Result<Table> {
        let name = name.into();
        if schema.len() != columns.len() {
            return Err(StoreError::Shape(format!(
                "{name}: {} schema entries for {} columns",
                schema.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for spec in &schema {
            if !seen.insert(spec.name.as_str()) {
                return Err(StoreError::Shape(format!("{name}: duplicate column `{}`", spec.name)));
            }
        }
        let row_count = columns.first().map_or(0, Vec::len);
        for (spec, col) in schema.iter().zip(&columns) {
            if col.len() != row_count {
                return Err(StoreError::Shape(format!(
                    "{name}: column `{}` has {} rows, expected {row_count}",
                    spec.name,
                    col.len()
                )));
            }
            if let Some(bad) = col.iter().find(|v| v.kind().is_some_and(|k| k != spec.kind)) {
                return Err(StoreError::Shape(format!(
                    "{name}: column `{}` is {} but holds {bad:?}",
                    spec.name, spec.kind
                )));
            }
        }
        Ok(Table { name, schema, columns, row_count })
    }

    /// Builds a table from row-major data.
    pub fn from_rows(name: impl Into<String>, schema: Vec<ColumnSpec>, rows: Vec<Vec<Value>>) -> Result<Table> {
        let mut columns = vec![Vec::with_capacity(rows.len()); schema.len()];
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != schema.len() {
                return Err(StoreError::Shape(format!("row {i} has {} cells, expected {}", row.len(), schema.len())));
            }
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Table::new(name, schema, columns)
    }

    /// A table with the given schema and no rows.
    pub fn empty(name: impl Into<String>, schema: Vec<ColumnSpec>) -> Table {
        let columns = vec![Vec::new(); schema.len()];
        Table { name: name.into(), schema, columns, row_count: 0 }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Table {
        self.name = name.into();
        self
    }

    pub fn schema(&self) -> &[ColumnSpec] {
        &self.schema
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column_count(&self) -> usize {
        self.schema.len()
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.schema.iter().map(|c| c.name.as_str())
    }

    /// Column position by name: exact match first, then a unique
    /// case-insensitive match.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.schema.iter().position(|c| c.name == name) {
            return Some(i);
        }
        let mut hits = self.schema.iter().enumerate().filter(|(_, c)| c.name.eq_ignore_ascii_case(name));
        match (hits.next(), hits.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    pub fn resolve(&self, name: &str) -> Result<usize> {
        self.column_index(name).ok_or_else(|| StoreError::bind(&self.name, name))
    }

    pub fn column(&self, name: &str) -> Option<&[Value]> {
        self.column_index(name).map(|i| self.columns[i].as_slice())
    }

    pub fn column_at(&self, idx: usize) -> &[Value] {
        &self.columns[idx]
    }

    pub fn kind_of(&self, name: &str) -> Option<ValueKind> {
        self.column_index(name).map(|i| self.schema[i].kind)
    }

    pub fn cell(&self, row: usize, col: usize) -> &Value {
        &self.columns[col][row]
    }

    pub fn row(&self, row: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c[row].clone()).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        (0..self.row_count).map(|r| self.row(r))
    }

    /// New table holding the given rows, in the given order.
    pub fn take_rows(&self, indices: &[usize]) -> Table {
        let columns = self.columns.iter().map(|c| indices.iter().map(|&i| c[i].clone()).collect()).collect();
        Table { name: self.name.clone(), schema: self.schema.clone(), columns, row_count: indices.len() }
    }

    /// New table with a subset of columns, in the given order.
    pub fn project(&self, names: &[&str]) -> Result<Table> {
        let mut schema = Vec::new();
        let mut columns = Vec::new();
        for n in names {
            let i = self.resolve(n)?;
            schema.push(self.schema[i].clone());
            columns.push(self.columns[i].clone());
        }
        let mut t = Table::new(self.name.clone(), schema, columns)?;
        t.row_count = self.row_count;
        Ok(t)
    }

    /// Replaces one column's cells, keeping its name and kind.
    pub(crate) fn with_column(&self, idx: usize, cells: Vec<Value>) -> Table {
        let mut t = self.clone();
        t.columns[idx] = cells;
        t
    }

    /// Appends `other`'s rows, matching columns by name.
    pub fn union(&self, other: &Table) -> Result<Table> {
        if self.schema.len() != other.schema.len() {
            return Err(StoreError::Shape(format!(
                "cannot combine {} and {}: different column counts",
                self.name, other.name
            )));
        }
        let mut columns = self.columns.clone();
        for (spec, col) in self.schema.iter().zip(columns.iter_mut()) {
            let j = other.schema.iter().position(|c| c.name == spec.name && c.kind == spec.kind).ok_or_else(|| {
                StoreError::Shape(format!(
                    "cannot combine {} and {}: column `{}` ({}) missing from {}",
                    self.name, other.name, spec.name, spec.kind, other.name
                ))
            })?;
            col.extend(other.columns[j].iter().cloned());
        }
        Ok(Table {
            name: self.name.clone(),
            schema: self.schema.clone(),
            columns,
            row_count: self.row_count + other.row_count,
        })
    }

    /// Fixed-width text rendering for consoles.
    pub fn to_text(&self, max_rows: usize) -> String {
        let shown = self.row_count.min(max_rows);
        let mut cells: Vec<Vec<String>> = vec![self.schema.iter().map(|c| c.name.clone()).collect()];
        for r in 0..shown {
            cells.push(self.columns.iter().map(|c| c[r].to_string()).collect());
        }
        let widths: Vec<usize> =
            (0..self.schema.len()).map(|j| cells.iter().map(|row| row[j].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for (i, row) in cells.iter().enumerate() {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                out.push_str(&rule.join("  "));
                out.push('\n');
            }
        }
        if shown < self.row_count {
            out.push_str(&format!("... {} more rows\n", self.row_count - shown));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        Table::from_rows(
            "t",
            vec![ColumnSpec::new("id", ValueKind::Int), ColumnSpec::new("District-Tag", ValueKind::Text)],
            vec![vec![Value::Int(1), Value::text("Dhaka")], vec![Value::Int(2), Value::Null]],
        )
        .unwrap()
    }

    #[test]
    fn shape_checks() {
        assert!(Table::new(
            "bad",
            vec![ColumnSpec::new("a", ValueKind::Int), ColumnSpec::new("a", ValueKind::Int)],
            vec![vec![], vec![]]
        )
        .is_err());
        assert!(Table::new("bad", vec![ColumnSpec::new("a", ValueKind::Int)], vec![vec![Value::text("x")]]).is_err());
        assert!(Table::new(
            "bad",
            vec![ColumnSpec::new("a", ValueKind::Int), ColumnSpec::new("b", ValueKind::Int)],
            vec![vec![Value::Int(1)], vec![]]
        )
        .is_err());
    }

    #[test]
    fn case_insensitive_lookup() {
        let t = sample();
        assert_eq!(t.column_index("district-tag"), Some(1));
        assert!(matches!(t.resolve("nope"), Err(StoreError::Bind { .. })));
    }

    #[test]
    fn take_project_union() {
        let t = sample();
        assert_eq!(t.take_rows(&[1]).row(0), vec![Value::Int(2), Value::Null]);
        assert_eq!(t.project(&["District-Tag"]).unwrap().column_count(), 1);
        assert_eq!(t.union(&t).unwrap().row_count(), 4);
    }

    #[test]
    fn text_rendering() {
        let text = sample().to_text(10);
        assert!(text.starts_with("id  District-Tag\n--  ------------\n1   Dhaka\n2\n"), "{text}");
    }
}
