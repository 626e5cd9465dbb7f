use std::cmp::Ordering;

use super::error::{Result, StoreError};
use super::table::Table;
use super::value::{Value, ValueKind};
use crate::mql::{CmpOp, Condition, Literal, Operand};
use crate::timefmt;

/// Value of an MQL literal. Date literals holding a time of day become
/// timestamps.
pub fn literal_value(lit: &Literal) -> Value {
    match lit {
        Literal::Text(s) => Value::Text(s.clone()),
        Literal::Int(v) => Value::Int(*v),
        Literal::Decimal(v) => Value::decimal(*v),
        Literal::Date(s) => match timefmt::parse_date(s) {
            Some(d) => Value::Date(d),
            None => timefmt::parse_timestamp(s).map_or(Value::Null, Value::Timestamp),
        },
    }
}

/// Indices of the rows of `table` for which `cond` holds, in row order.
///
/// Any comparison touching a null cell is false. Columns are bound and
/// operand kinds checked before any row is looked at, so a bad condition
/// fails even on an empty table.
pub fn eval_filter(table: &Table, cond: &Condition) -> Result<Vec<usize>> {
    let bound = bind(table, cond)?;
    Ok((0..table.row_count()).filter(|&r| bound.eval(table, r)).collect())
}

/// The rows of `table` satisfying `cond`, as a new table.
pub fn filter_table(table: &Table, cond: &Condition) -> Result<Table> {
    Ok(table.take_rows(&eval_filter(table, cond)?))
}

enum BoundOperand {
    Column(usize),
    Const(Value),
}

enum Bound {
    Compare(BoundOperand, CmpOp, BoundOperand),
    And(Box<Bound>, Box<Bound>),
    Or(Box<Bound>, Box<Bound>),
    Not(Box<Bound>),
}

impl Bound {
    fn eval(&self, table: &Table, row: usize) -> bool {
        match self {
            Bound::Compare(l, op, r) => {
                let lv = operand_value(table, row, l);
                let rv = operand_value(table, row, r);
                lv.compare(rv).is_some_and(|ord| op.test(ord))
            }
            Bound::And(a, b) => a.eval(table, row) && b.eval(table, row),
            Bound::Or(a, b) => a.eval(table, row) || b.eval(table, row),
            Bound::Not(c) => !c.eval(table, row),
        }
    }
}

fn operand_value<'a>(table: &'a Table, row: usize, op: &'a BoundOperand) -> &'a Value {
    match op {
        BoundOperand::Column(c) => table.cell(row, *c),
        BoundOperand::Const(v) => v,
    }
}

fn bind(table: &Table, cond: &Condition) -> Result<Bound> {
    Ok(match cond {
        Condition::Compare { left, op, right } => {
            let (l, lk) = bind_operand(table, left)?;
            let (r, rk) = bind_operand(table, right)?;
            check_comparable(left, lk, &l, right, rk, &r)?;
            Bound::Compare(l, *op, r)
        }
        Condition::And(a, b) => Bound::And(Box::new(bind(table, a)?), Box::new(bind(table, b)?)),
        Condition::Or(a, b) => Bound::Or(Box::new(bind(table, a)?), Box::new(bind(table, b)?)),
        Condition::Not(c) => Bound::Not(Box::new(bind(table, c)?)),
    })
}

fn bind_operand(table: &Table, op: &Operand) -> Result<(BoundOperand, Option<ValueKind>)> {
    match op {
        Operand::Column(name) => {
            let idx = table.resolve(name)?;
            Ok((BoundOperand::Column(idx), Some(table.schema()[idx].kind)))
        }
        Operand::Literal(lit) => {
            let v = literal_value(lit);
            let kind = v.kind();
            Ok((BoundOperand::Const(v), kind))
        }
    }
}

fn check_comparable(
    left: &Operand,
    lk: Option<ValueKind>,
    l: &BoundOperand,
    right: &Operand,
    rk: Option<ValueKind>,
    r: &BoundOperand,
) -> Result<()> {
    let (Some(a), Some(b)) = (lk, rk) else { return Ok(()) };
    let ok = (a.is_numeric() && b.is_numeric())
        || (a.is_temporal() && b.is_temporal())
        || (a == ValueKind::Text && b == ValueKind::Text)
        || (a.is_temporal() && b == ValueKind::Text && text_is_temporal(r))
        || (b.is_temporal() && a == ValueKind::Text && text_is_temporal(l));
    if ok {
        Ok(())
    } else {
        Err(StoreError::Eval(format!("cannot compare {} ({a}) with {} ({b})", describe(left), describe(right))))
    }
}

/// Text columns compared with temporal values are parsed row by row; text
/// literals must parse up front.
fn text_is_temporal(op: &BoundOperand) -> bool {
    match op {
        BoundOperand::Column(_) => true,
        BoundOperand::Const(v) => v.as_str().is_some_and(|s| timefmt::parse_timestamp(s).is_some()),
    }
}

fn describe(op: &Operand) -> String {
    match op {
        Operand::Column(c) => format!("column `{c}`"),
        Operand::Literal(l) => format!("literal {l}"),
    }
}

/// Orders two values for `MIN`/`MAX` style reductions over one column.
pub(crate) fn value_order(a: &Value, b: &Value) -> Ordering {
    a.compare(b).unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mql::parse_statement;
    use crate::store::ColumnSpec;

    fn table() -> Table {
        Table::from_rows(
            "t",
            vec![
                ColumnSpec::new("district-tag", ValueKind::Text),
                ColumnSpec::new("n", ValueKind::Int),
                ColumnSpec::new("at", ValueKind::Timestamp),
            ],
            vec![
                vec![
                    Value::text("Dhaka"),
                    Value::Int(1),
                    Value::parse_as("2020-01-02T00:00:00", ValueKind::Timestamp).unwrap(),
                ],
                vec![Value::text("Sylhet"), Value::Null, Value::parse_as("2021-01-02", ValueKind::Timestamp).unwrap()],
                vec![Value::Null, Value::Int(3), Value::Null],
            ],
        )
        .unwrap()
    }

    fn cond(text: &str) -> Condition {
        let stmt = parse_statement(&format!("GENERATE CLUSTER OF 1 FEATURES n FROM t WHERE {text}")).unwrap();
        stmt.as_generate().unwrap().filter.clone().unwrap()
    }

    #[test]
    fn basic_filters() {
        let t = table();
        assert_eq!(eval_filter(&t, &cond("\"district-tag\" = 'Dhaka'")).unwrap(), vec![0]);
        assert_eq!(eval_filter(&t, &cond("1 = 1")).unwrap(), vec![0, 1, 2]);
        assert!(eval_filter(&t, &cond("\"district-tag\" = 'Dhaka' AND \"district-tag\" <> 'Dhaka'"))
            .unwrap()
            .is_empty());
        assert_eq!(eval_filter(&t, &cond("at >= DATE '2021-01-01'")).unwrap(), vec![1]);
        assert_eq!(eval_filter(&t, &cond("at < '2021-01-01'")).unwrap(), vec![0]);
    }

    #[test]
    fn nulls_compare_false() {
        let t = table();
        assert_eq!(eval_filter(&t, &cond("n > 0")).unwrap(), vec![0, 2]);
        assert_eq!(eval_filter(&t, &cond("n <> 1")).unwrap(), vec![2]);
        // NOT flips the per-row outcome, so null rows land on the true side
        assert_eq!(eval_filter(&t, &cond("NOT n = 1")).unwrap(), vec![1, 2]);
    }

    #[test]
    fn bind_and_kind_errors() {
        let t = table();
        match eval_filter(&t, &cond("missing = 1")) {
            Err(StoreError::Bind { column, .. }) => assert_eq!(column, "missing"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(eval_filter(&t, &cond("n = 'x'")), Err(StoreError::Eval(_))));
        assert!(matches!(eval_filter(&t, &cond("at = 'not a date'")), Err(StoreError::Eval(_))));
        let empty = t.take_rows(&[]);
        assert!(eval_filter(&empty, &cond("missing = 1")).is_err());
    }
}
