//! Grouped aggregation: the structured stand-in for the SQL fragment the
//! pipeline needs (filter, group by, count/sum/min/max/avg, order, limit).

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::error::{Result, StoreError};
use super::filter::{eval_filter, value_order};
use super::registry::Registry;
use super::table::{ColumnSpec, Table};
use super::value::{Value, ValueKey, ValueKind};
use crate::mql::{apply_arith, Condition, IntAggregate, IntExpr};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "column", rename_all = "snake_case")]
pub enum GroupKey {
    Column(String),
    /// `YYYY-MM` of a date or timestamp column.
    Month(String),
    Year(String),
}

impl GroupKey {
    pub fn column(&self) -> &str {
        match self {
            GroupKey::Column(c) | GroupKey::Month(c) | GroupKey::Year(c) => c,
        }
    }

    /// Name of the key column in the output table.
    pub fn output_name(&self) -> String {
        match self {
            GroupKey::Column(c) => c.clone(),
            GroupKey::Month(_) => "month".into(),
            GroupKey::Year(_) => "year".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AggFunc {
    CountAll,
    Count,
    CountDistinct,
    Sum,
    Min,
    Max,
    Avg,
}

impl AggFunc {
    pub fn name(self) -> &'static str {
        match self {
            AggFunc::CountAll | AggFunc::Count => "count",
            AggFunc::CountDistinct => "count_distinct",
            AggFunc::Sum => "sum",
            AggFunc::Min => "min",
            AggFunc::Max => "max",
            AggFunc::Avg => "avg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub func: AggFunc,
    /// `None` only for `CountAll`.
    pub column: Option<String>,
    pub alias: Option<String>,
}

impl Aggregate {
    pub fn count_all() -> Self {
        Aggregate { func: AggFunc::CountAll, column: None, alias: None }
    }

    pub fn of(func: AggFunc, column: &str) -> Self {
        Aggregate { func, column: Some(column.to_string()), alias: None }
    }

    pub fn alias(mut self, name: &str) -> Self {
        self.alias = Some(name.to_string());
        self
    }

    pub fn output_name(&self) -> String {
        if let Some(a) = &self.alias {
            return a.clone();
        }
        match &self.column {
            None => "count".into(),
            Some(c) => format!("{}_{c}", self.func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortKey {
    /// An output column name.
    pub column: String,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregationPlan {
    pub source: String,
    pub filter: Option<Condition>,
    pub group_by: Vec<GroupKey>,
    pub aggregates: Vec<Aggregate>,
    pub sort: Option<SortKey>,
    pub limit: Option<usize>,
}

impl AggregationPlan {
    pub fn new(source: &str) -> Self {
        AggregationPlan {
            source: source.to_string(),
            filter: None,
            group_by: Vec::new(),
            aggregates: Vec::new(),
            sort: None,
            limit: None,
        }
    }

    pub fn filter(mut self, cond: Condition) -> Self {
        self.filter = Some(cond);
        self
    }

    pub fn group(mut self, key: GroupKey) -> Self {
        self.group_by.push(key);
        self
    }

    pub fn aggregate(mut self, agg: Aggregate) -> Self {
        self.aggregates.push(agg);
        self
    }

    pub fn sort_by(mut self, column: &str, descending: bool) -> Self {
        self.sort = Some(SortKey { column: column.to_string(), descending });
        self
    }

    pub fn limit(mut self, n: usize) -> Self {
        self.limit = Some(n);
        self
    }
}

/// Runs `plan` against the table it names in `registry`.
pub fn run_aggregation(plan: &AggregationPlan, registry: &Registry) -> Result<Table> {
    let table = registry.table(&plan.source)?;
    aggregate_table(&table, plan)
}

/// Runs `plan` against `table`, ignoring `plan.source`.
///
/// Output has one row per distinct group key tuple (a single row when there
/// are no group keys, even over zero input rows). Rows are ordered by the
/// sort key when given, with ties and the unsorted case ordered by
/// ascending group key.
pub fn aggregate_table(table: &Table, plan: &AggregationPlan) -> Result<Table> {
    let keys = bind_keys(table, &plan.group_by)?;
    let aggs = bind_aggregates(table, &plan.aggregates)?;

    let mut schema: Vec<ColumnSpec> = keys.iter().map(|k| ColumnSpec::new(k.name.clone(), k.kind)).collect();
    schema.extend(aggs.iter().map(|a| ColumnSpec::new(a.name.clone(), a.kind)));
    let mut seen = HashSet::new();
    for s in &schema {
        if !seen.insert(s.name.clone()) {
            return Err(StoreError::Eval(format!("duplicate output column `{}`", s.name)));
        }
    }

    let rows = match &plan.filter {
        Some(cond) => eval_filter(table, cond)?,
        None => (0..table.row_count()).collect(),
    };

    let mut order: Vec<Vec<Value>> = Vec::new();
    let mut groups: HashMap<Vec<ValueKey>, Vec<usize>> = HashMap::new();
    if keys.is_empty() {
        order.push(Vec::new());
        groups.insert(Vec::new(), rows);
    } else {
        for r in rows {
            let key: Vec<Value> = keys.iter().map(|k| k.value(table, r)).collect();
            let hash: Vec<ValueKey> = key.iter().map(Value::key).collect();
            groups
                .entry(hash)
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(r);
        }
    }

    let mut out_rows: Vec<Vec<Value>> = Vec::with_capacity(order.len());
    for key in order {
        let hash: Vec<ValueKey> = key.iter().map(Value::key).collect();
        let members = &groups[&hash];
        let mut row = key;
        for a in &aggs {
            row.push(a.reduce(table, members)?);
        }
        out_rows.push(row);
    }

    let n_keys = keys.len();
    let by_key = |a: &Vec<Value>, b: &Vec<Value>| -> Ordering {
        a[..n_keys].iter().zip(&b[..n_keys]).map(|(x, y)| x.sort_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    };
    match &plan.sort {
        Some(sort) => {
            let idx = schema
                .iter()
                .position(|s| s.name == sort.column)
                .or_else(|| schema.iter().position(|s| s.name.eq_ignore_ascii_case(&sort.column)))
                .ok_or_else(|| StoreError::bind(&plan.source, &sort.column))?;
            out_rows.sort_by(|a, b| {
                let o = a[idx].sort_cmp(&b[idx]);
                let o = if sort.descending { o.reverse() } else { o };
                o.then_with(|| by_key(a, b))
            });
        }
        None => out_rows.sort_by(by_key),
    }
    if let Some(n) = plan.limit {
        out_rows.truncate(n);
    }
    Table::from_rows(plan.source.clone(), schema, out_rows)
}

struct BoundKey {
    col: usize,
    name: String,
    kind: ValueKind,
    derive: Option<fn(&Value) -> Value>,
}

impl BoundKey {
    fn value(&self, table: &Table, row: usize) -> Value {
        let v = table.cell(row, self.col);
        match self.derive {
            Some(f) => f(v),
            None => v.clone(),
        }
    }
}

fn bind_keys(table: &Table, keys: &[GroupKey]) -> Result<Vec<BoundKey>> {
    keys.iter()
        .map(|k| {
            let col = table.resolve(k.column())?;
            let src_kind = table.schema()[col].kind;
            let derived = |kind, f: fn(&Value) -> Value| {
                if src_kind.is_temporal() {
                    Ok(BoundKey { col, name: k.output_name(), kind, derive: Some(f) })
                } else {
                    Err(StoreError::Eval(format!(
                        "{}() needs a date or timestamp column, `{}` is {src_kind}",
                        k.output_name(),
                        k.column()
                    )))
                }
            };
            match k {
                GroupKey::Column(_) => {
                    Ok(BoundKey { col, name: table.schema()[col].name.clone(), kind: src_kind, derive: None })
                }
                GroupKey::Month(_) => derived(ValueKind::Text, |v| v.month_key().map_or(Value::Null, Value::Text)),
                GroupKey::Year(_) => derived(ValueKind::Int, |v| v.year().map_or(Value::Null, Value::Int)),
            }
        })
        .collect()
}

struct BoundAgg {
    func: AggFunc,
    col: Option<usize>,
    name: String,
    kind: ValueKind,
}

fn bind_aggregates(table: &Table, aggs: &[Aggregate]) -> Result<Vec<BoundAgg>> {
    aggs.iter()
        .map(|a| {
            let name = a.output_name();
            let Some(col_name) = &a.column else {
                return if a.func == AggFunc::CountAll {
                    Ok(BoundAgg { func: a.func, col: None, name, kind: ValueKind::Int })
                } else {
                    Err(StoreError::Eval(format!("{} needs a column", a.func.name())))
                };
            };
            let col = table.resolve(col_name)?;
            let src = table.schema()[col].kind;
            let kind = match a.func {
                AggFunc::CountAll | AggFunc::Count | AggFunc::CountDistinct => ValueKind::Int,
                AggFunc::Min | AggFunc::Max => src,
                AggFunc::Sum if src.is_numeric() => src,
                AggFunc::Avg if src.is_numeric() => ValueKind::Decimal,
                AggFunc::Sum | AggFunc::Avg => {
                    return Err(StoreError::Eval(format!(
                        "{} over `{col_name}` needs a numeric column, found {src}",
                        a.func.name().to_uppercase()
                    )))
                }
            };
            Ok(BoundAgg { func: a.func, col: Some(col), name, kind })
        })
        .collect()
}

impl BoundAgg {
    fn reduce(&self, table: &Table, rows: &[usize]) -> Result<Value> {
        let Some(col) = self.col else {
            return Ok(Value::Int(rows.len() as i64));
        };
        let values = rows.iter().map(|&r| table.cell(r, col)).filter(|v| !v.is_null());
        Ok(match self.func {
            AggFunc::CountAll => Value::Int(rows.len() as i64),
            AggFunc::Count => Value::Int(values.count() as i64),
            AggFunc::CountDistinct => Value::Int(values.map(Value::key).collect::<HashSet<_>>().len() as i64),
            AggFunc::Min => values.min_by(|a, b| value_order(a, b)).cloned().unwrap_or(Value::Null),
            AggFunc::Max => values.max_by(|a, b| value_order(a, b)).cloned().unwrap_or(Value::Null),
            AggFunc::Sum => {
                let vals: Vec<&Value> = values.collect();
                if vals.is_empty() {
                    Value::Null
                } else if self.kind == ValueKind::Int {
                    let mut acc: i64 = 0;
                    for v in vals {
                        let Value::Int(x) = v else { unreachable!("int column") };
                        acc = acc
                            .checked_add(*x)
                            .ok_or_else(|| StoreError::Eval(format!("integer overflow in SUM({})", self.name)))?;
                    }
                    Value::Int(acc)
                } else {
                    Value::decimal(vals.iter().filter_map(|v| v.as_f64()).sum())
                }
            }
            AggFunc::Avg => {
                let vals: Vec<f64> = values.filter_map(Value::as_f64).collect();
                if vals.is_empty() {
                    Value::Null
                } else {
                    Value::decimal(vals.iter().sum::<f64>() / vals.len() as f64)
                }
            }
        })
    }
}

/// Evaluates an integer expression against `table` (the union of a
/// statement's FROM tables).
///
/// Aggregates ignore nulls. `AVG`, and `MIN`/`MAX` over decimal columns,
/// round down to an integer.
pub fn evaluate_int_expr(expr: &IntExpr, table: &Table) -> Result<i64> {
    match expr {
        IntExpr::Literal(v) => Ok(*v),
        IntExpr::Binary { op, lhs, rhs } => {
            let l = evaluate_int_expr(lhs, table)?;
            let r = evaluate_int_expr(rhs, table)?;
            apply_arith(*op, l, r).map_err(StoreError::Eval)
        }
        IntExpr::Aggregate { func, column } => {
            let Some(column) = column else {
                return Ok(table.row_count() as i64);
            };
            let col = table.resolve(column)?;
            let kind = table.schema()[col].kind;
            let values: Vec<&Value> = table.column_at(col).iter().filter(|v| !v.is_null()).collect();
            let name = format!("{func:?}").to_uppercase();
            let numeric = || -> Result<Vec<f64>> {
                if !kind.is_numeric() {
                    return Err(StoreError::Eval(format!("{name}({column}) needs a numeric column, found {kind}")));
                }
                if values.is_empty() {
                    return Err(StoreError::Eval(format!("{name}({column}) over no values")));
                }
                Ok(values.iter().filter_map(|v| v.as_f64()).collect())
            };
            let to_int = |x: f64| -> Result<i64> {
                let f = x.floor();
                if f.abs() < 9.2e18 {
                    Ok(f as i64)
                } else {
                    Err(StoreError::Eval(format!("{name}({column}) is out of integer range")))
                }
            };
            match func {
                IntAggregate::CountAll => Ok(table.row_count() as i64),
                IntAggregate::Count => Ok(values.len() as i64),
                IntAggregate::CountDistinct => Ok(values.iter().map(|v| v.key()).collect::<HashSet<_>>().len() as i64),
                IntAggregate::Min | IntAggregate::Max if kind == ValueKind::Int => {
                    let ints = values.iter().filter_map(|v| match v {
                        Value::Int(x) => Some(*x),
                        _ => None,
                    });
                    let out = if *func == IntAggregate::Min { ints.min() } else { ints.max() };
                    out.ok_or_else(|| StoreError::Eval(format!("{name}({column}) over no values")))
                }
                IntAggregate::Min => to_int(numeric()?.into_iter().fold(f64::INFINITY, f64::min)),
                IntAggregate::Max => to_int(numeric()?.into_iter().fold(f64::NEG_INFINITY, f64::max)),
                IntAggregate::Avg if kind == ValueKind::Int => {
                    numeric()?;
                    let sum: i128 = values
                        .iter()
                        .map(|v| match v {
                            Value::Int(x) => *x as i128,
                            _ => 0,
                        })
                        .sum();
                    let n = values.len() as i128;
                    let q = sum.div_euclid(n);
                    i64::try_from(q).map_err(|_| StoreError::Eval(format!("{name}({column}) is out of integer range")))
                }
                IntAggregate::Avg => {
                    let v = numeric()?;
                    to_int(v.iter().sum::<f64>() / v.len() as f64)
                }
            }
        }
    }
}
