use std::collections::HashSet;

use super::error::{Result, StoreError};
use super::filter::literal_value;
use super::table::Table;
use super::value::{Value, ValueKind};
use crate::mql::{InspectDirective, Literal};

/// Applies cleaning directives in order, returning a new table.
pub fn apply_inspect(table: &Table, directives: &[InspectDirective]) -> Result<Table> {
    let mut current = table.clone();
    for d in directives {
        current = match d {
            InspectDirective::DropNull(col) => {
                let c = current.resolve(col)?;
                let keep: Vec<usize> = (0..current.row_count()).filter(|&r| !current.cell(r, c).is_null()).collect();
                current.take_rows(&keep)
            }
            InspectDirective::FillNull(col, lit) => {
                let c = current.resolve(col)?;
                let kind = current.schema()[c].kind;
                let fill = coerce_literal(lit, kind)
                    .ok_or_else(|| StoreError::Eval(format!("fillnull: {lit} does not fit {kind} column `{col}`")))?;
                let cells =
                    current.column_at(c).iter().map(|v| if v.is_null() { fill.clone() } else { v.clone() }).collect();
                current.with_column(c, cells)
            }
            InspectDirective::Dedupe => {
                let mut seen = HashSet::new();
                let keep: Vec<usize> = (0..current.row_count())
                    .filter(|&r| seen.insert(current.row(r).iter().map(Value::key).collect::<Vec<_>>()))
                    .collect();
                current.take_rows(&keep)
            }
        };
    }
    Ok(current)
}

fn coerce_literal(lit: &Literal, kind: ValueKind) -> Option<Value> {
    let v = literal_value(lit);
    match (v, kind) {
        (Value::Int(i), ValueKind::Decimal) => Some(Value::Decimal(i as f64)),
        (Value::Text(s), ValueKind::Date | ValueKind::Timestamp) => Value::parse_as(&s, kind).ok(),
        (Value::Date(d), ValueKind::Timestamp) => d.and_hms_opt(0, 0, 0).map(Value::Timestamp),
        (v, k) if v.kind() == Some(k) => Some(v),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::ColumnSpec;

    fn table() -> Table {
        let offsets = [Some(1), None, Some(3), Some(1), None, Some(6), Some(7), Some(8), Some(9), Some(1)];
        let names = ["a", "b", "c", "a", "e", "f", "g", "h", "i", "a"];
        Table::from_rows(
            "t",
            vec![ColumnSpec::new("offset", ValueKind::Int), ColumnSpec::new("name", ValueKind::Text)],
            offsets.iter().zip(names).map(|(o, n)| vec![o.map_or(Value::Null, Value::Int), Value::text(n)]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn dropnull_and_fillnull() {
        let t = table();
        let before = t.clone();
        let dropped = apply_inspect(&t, &[InspectDirective::DropNull("offset".into())]).unwrap();
        assert_eq!(dropped.row_count(), 8);
        let filled = apply_inspect(
            &t,
            &[
                InspectDirective::FillNull("offset".into(), Literal::Int(0)),
                InspectDirective::DropNull("offset".into()),
            ],
        )
        .unwrap();
        assert_eq!(filled.row_count(), 10);
        assert_eq!(t, before);
    }

    #[test]
    fn dedupe_keeps_first() {
        let t = table();
        let d = apply_inspect(&t, &[InspectDirective::Dedupe]).unwrap();
        assert_eq!(d.row_count(), 8);
        let distinct = d.clone();
        assert_eq!(apply_inspect(&distinct, &[InspectDirective::Dedupe]).unwrap(), distinct);
    }

    #[test]
    fn errors() {
        let t = table();
        assert!(matches!(
            apply_inspect(&t, &[InspectDirective::FillNull("offset".into(), Literal::Text("x".into()))]),
            Err(StoreError::Eval(_))
        ));
        assert!(matches!(apply_inspect(&t, &[InspectDirective::DropNull("zz".into())]), Err(StoreError::Bind { .. })));
    }
}
