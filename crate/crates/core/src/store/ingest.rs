use std::io::Read;
use std::path::Path;

use super::error::{Result, StoreError};
use super::table::{ColumnSpec, Table};
use super::value::{parse_decimal, parse_int, Value, ValueKind};
use crate::timefmt;

/// Reads an RFC 4180 CSV file with a header row into a typed table.
///
/// Without a declared schema each column's kind is inferred from all of its
/// non-empty cells, trying Int, Decimal, Date and Timestamp in that order
/// and falling back to Text. Declared columns are matched to the header by
/// name; any header column not declared is inferred. Empty cells become
/// `Null`. Row numbers in errors count data rows from 1.
pub fn ingest_csv(path: &Path, name: &str, declared: Option<&[ColumnSpec]>) -> Result<Table> {
    let file =
        std::fs::File::open(path).map_err(|e| StoreError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    ingest_reader(file, name, declared)
}

pub fn ingest_reader<R: Read>(reader: R, name: &str, declared: Option<&[ColumnSpec]>) -> Result<Table> {
    let ingest_err = |row: usize, column: Option<String>, message: String| StoreError::Ingest {
        source_name: name.to_string(),
        row,
        column,
        message,
    };

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header: Vec<String> =
        rdr.headers().map_err(|e| ingest_err(0, None, e.to_string()))?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(ingest_err(0, None, "missing header row".into()));
    }

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| ingest_err(row, None, e.to_string()))?;
        if record.len() != header.len() {
            return Err(ingest_err(row, None, format!("expected {} fields, found {}", header.len(), record.len())));
        }
        for (col, cell) in raw.iter_mut().zip(record.iter()) {
            col.push(cell.to_string());
        }
    }

    if let Some(decl) = declared {
        for spec in decl {
            if !header.contains(&spec.name) {
                return Err(ingest_err(0, Some(spec.name.clone()), "declared column not in header".into()));
            }
        }
    }

    let mut schema = Vec::with_capacity(header.len());
    let mut columns = Vec::with_capacity(header.len());
    for (col_name, cells) in header.iter().zip(raw) {
        let declared_kind = declared.and_then(|d| d.iter().find(|s| &s.name == col_name)).map(|s| s.kind);
        let kind = declared_kind.unwrap_or_else(|| infer_kind(&cells));
        let mut values = Vec::with_capacity(cells.len());
        for (i, cell) in cells.iter().enumerate() {
            let v = Value::parse_as(cell, kind).map_err(|m| ingest_err(i + 1, Some(col_name.clone()), m))?;
            values.push(v);
        }
        schema.push(ColumnSpec::new(col_name.clone(), kind));
        columns.push(values);
    }
    Table::new(name, schema, columns)
}

pub fn infer_kind(cells: &[String]) -> ValueKind {
    let present: Vec<&str> = cells.iter().map(String::as_str).filter(|c| !c.is_empty()).collect();
    if present.is_empty() {
        return ValueKind::Text;
    }
    type Parses = fn(&str) -> bool;
    let candidates: [(ValueKind, Parses); 4] = [
        (ValueKind::Int, |c| parse_int(c).is_some()),
        (ValueKind::Decimal, |c| parse_decimal(c).is_some()),
        (ValueKind::Date, |c| timefmt::parse_date(c).is_some()),
        (ValueKind::Timestamp, |c| timefmt::parse_timestamp(c).is_some()),
    ];
    candidates.into_iter().find(|(_, accepts)| present.iter().all(|c| accepts(c))).map_or(ValueKind::Text, |(k, _)| k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(s: &str) -> Result<Table> {
        ingest_reader(s.as_bytes(), "t", None)
    }

    #[test]
    fn prothomalo_shaped_header() {
        let csv = "ID,URL,headline,district-tag,division-tag,subdistrict-tag,last-published-at,offset\n\
                   1,https://x/1,girl abused,Dhaka,Dhaka,,2020-01-05T10:00:00,0\n";
        let t = ingest(csv).unwrap();
        assert_eq!(t.column_count(), 8);
        assert_eq!(t.kind_of("last-published-at"), Some(ValueKind::Timestamp));
        assert_eq!(t.kind_of("ID"), Some(ValueKind::Int));
        assert_eq!(t.cell(0, 5), &Value::Null);
    }

    #[test]
    fn header_only() {
        let t = ingest("a,b\n").unwrap();
        assert_eq!(t.row_count(), 0);
        assert_eq!(t.column_count(), 2);
    }

    #[test]
    fn inference_priority() {
        let t = ingest("a,b,c,d,e\n1,1.5,2020-01-01,2020-01-01,1\n2,2,2020-01-02,2020-01-02T03:04:05,x\n").unwrap();
        let kinds: Vec<_> = t.schema().iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            vec![ValueKind::Int, ValueKind::Decimal, ValueKind::Date, ValueKind::Timestamp, ValueKind::Text]
        );
        let t = ingest("v\n1\n2\nx\n").unwrap();
        assert_eq!(t.kind_of("v"), Some(ValueKind::Text));
    }

    #[test]
    fn ragged_row_reports_row_number() {
        let err = ingest("a,b\n1,2\n3\n").unwrap_err();
        match err {
            StoreError::Ingest { row, .. } => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn declared_schema_coercion() {
        let decl = [ColumnSpec::new("a", ValueKind::Int)];
        let err = ingest_reader("a,b\n1,x\nq,y\n".as_bytes(), "t", Some(&decl)).unwrap_err();
        match err {
            StoreError::Ingest { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column.as_deref(), Some("a"));
            }
            other => panic!("{other:?}"),
        }
        let decl = [ColumnSpec::new("a", ValueKind::Decimal)];
        let t = ingest_reader("a\n1\n".as_bytes(), "t", Some(&decl)).unwrap();
        assert_eq!(t.cell(0, 0), &Value::Decimal(1.0));
    }

    #[test]
    fn quoted_fields_and_unicode() {
        let t = ingest("h,n\n\"ঢাকায় শিশু, ধর্ষণ\",1\n").unwrap();
        assert_eq!(t.cell(0, 0), &Value::text("ঢাকায় শিশু, ধর্ষণ"));
    }
}
