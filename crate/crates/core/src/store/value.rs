use std::cmp::Ordering;
use std::fmt;

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize, Serializer};

use crate::timefmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Int,
    Decimal,
    Text,
    Date,
    Timestamp,
}

impl ValueKind {
    pub fn is_numeric(self) -> bool {
        matches!(self, ValueKind::Int | ValueKind::Decimal)
    }

    pub fn is_temporal(self) -> bool {
        matches!(self, ValueKind::Date | ValueKind::Timestamp)
    }

    pub fn name(self) -> &'static str {
        match self {
            ValueKind::Int => "int",
            ValueKind::Decimal => "decimal",
            ValueKind::Text => "text",
            ValueKind::Date => "date",
            ValueKind::Timestamp => "timestamp",
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single cell. Decimals are always finite.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Int(i64),
    Decimal(f64),
    Text(String),
    Date(NaiveDate),
    Timestamp(NaiveDateTime),
}

impl Value {
    /// Returns `Null` for NaN or infinite input.
    pub fn decimal(v: f64) -> Value {
        if v.is_finite() {
            Value::Decimal(v)
        } else {
            Value::Null
        }
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn kind(&self) -> Option<ValueKind> {
        match self {
            Value::Null => None,
            Value::Int(_) => Some(ValueKind::Int),
            Value::Decimal(_) => Some(ValueKind::Decimal),
            Value::Text(_) => Some(ValueKind::Text),
            Value::Date(_) => Some(ValueKind::Date),
            Value::Timestamp(_) => Some(ValueKind::Timestamp),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Decimal(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Timestamp view of a temporal value; dates map to midnight.
    pub fn as_timestamp(&self) -> Option<NaiveDateTime> {
        match self {
            Value::Date(d) => d.and_hms_opt(0, 0, 0),
            Value::Timestamp(ts) => Some(*ts),
            _ => None,
        }
    }

    /// `YYYY-MM` key of a temporal value.
    pub fn month_key(&self) -> Option<String> {
        self.as_timestamp().map(|ts| format!("{:04}-{:02}", ts.year(), ts.month()))
    }

    pub fn year(&self) -> Option<i64> {
        self.as_timestamp().map(|ts| ts.year() as i64)
    }

    /// Parses a raw cell as `kind`. Empty input is `Null`.
    pub fn parse_as(raw: &str, kind: ValueKind) -> Result<Value, String> {
        if raw.is_empty() {
            return Ok(Value::Null);
        }
        let parsed = match kind {
            ValueKind::Int => parse_int(raw).map(Value::Int),
            ValueKind::Decimal => parse_decimal(raw).map(Value::Decimal),
            ValueKind::Text => Some(Value::Text(raw.to_string())),
            ValueKind::Date => timefmt::parse_date(raw).map(Value::Date),
            ValueKind::Timestamp => timefmt::parse_timestamp(raw).map(Value::Timestamp),
        };
        parsed.ok_or_else(|| format!("cannot read {raw:?} as {kind}"))
    }

    /// Ordering between two non-null values of compatible kinds.
    ///
    /// Int and Decimal compare numerically, Date and Timestamp compare in
    /// time, and text compares against temporal values after parsing it as
    /// an ISO-8601 date. Returns `None` when either side is null or the
    /// kinds are incompatible.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        use Value::*;
        match (self, other) {
            (Null, _) | (_, Null) => None,
            (Int(a), Int(b)) => Some(a.cmp(b)),
            (Int(_) | Decimal(_), Int(_) | Decimal(_)) => self.as_f64()?.partial_cmp(&other.as_f64()?),
            (Text(a), Text(b)) => Some(a.cmp(b)),
            (Date(a), Date(b)) => Some(a.cmp(b)),
            (Date(_) | Timestamp(_), Date(_) | Timestamp(_)) => Some(self.as_timestamp()?.cmp(&other.as_timestamp()?)),
            (Date(_) | Timestamp(_), Text(s)) => {
                let rhs = timefmt::parse_timestamp(s)?;
                Some(self.as_timestamp()?.cmp(&rhs))
            }
            (Text(_), Date(_) | Timestamp(_)) => other.compare(self).map(Ordering::reverse),
            _ => None,
        }
    }

    /// Total order used for sorting group keys: nulls first, then by kind
    /// rank, then by value.
    pub fn sort_cmp(&self, other: &Value) -> Ordering {
        fn rank(v: &Value) -> u8 {
            match v {
                Value::Null => 0,
                Value::Int(_) | Value::Decimal(_) => 1,
                Value::Date(_) | Value::Timestamp(_) => 2,
                Value::Text(_) => 3,
            }
        }
        rank(self).cmp(&rank(other)).then_with(|| self.compare(other).unwrap_or(Ordering::Equal))
    }

    /// Hashable identity used for grouping and de-duplication.
    pub(crate) fn key(&self) -> ValueKey {
        match self {
            Value::Null => ValueKey::Null,
            Value::Int(v) => ValueKey::Int(*v),
            Value::Decimal(v) => ValueKey::Bits(v.to_bits()),
            Value::Text(s) => ValueKey::Text(s.clone()),
            Value::Date(d) => ValueKey::Date(*d),
            Value::Timestamp(t) => ValueKey::Timestamp(*t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum ValueKey {
    Null,
    Int(i64),
    Bits(u64),
    Text(String),
    Date(NaiveDate),
    Timestamp(NaiveDateTime),
}

pub(crate) fn parse_int(raw: &str) -> Option<i64> {
    let t = raw.trim();
    if t.is_empty() || !t.trim_start_matches(['-', '+']).chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

pub(crate) fn parse_decimal(raw: &str) -> Option<f64> {
    let t = raw.trim();
    // rejects "NaN", "inf" and friends, which f64::from_str would accept
    if !t.chars().any(|c| c.is_ascii_digit())
        || t.chars().any(|c| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
    {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Number formatting used everywhere a value is shown to people: integral
/// values print without a fractional part, others with up to four decimals.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Int(v) => write!(f, "{v}"),
            Value::Decimal(v) => f.write_str(&format_number(*v)),
            Value::Text(s) => f.write_str(s),
            Value::Date(d) => f.write_str(&timefmt::format_date(*d)),
            Value::Timestamp(ts) => f.write_str(&timefmt::format_timestamp(*ts)),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Null => s.serialize_none(),
            Value::Int(v) => s.serialize_i64(*v),
            Value::Decimal(v) => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_is_never_stored() {
        assert_eq!(Value::decimal(f64::NAN), Value::Null);
        assert_eq!(Value::decimal(f64::INFINITY), Value::Null);
        assert!(Value::parse_as("NaN", ValueKind::Decimal).is_err());
        assert!(Value::parse_as("inf", ValueKind::Decimal).is_err());
    }

    #[test]
    fn mixed_comparisons() {
        assert_eq!(Value::Int(2).compare(&Value::Decimal(2.5)), Some(Ordering::Less));
        let d = Value::parse_as("2020-01-05", ValueKind::Date).unwrap();
        let ts = Value::parse_as("2020-01-05T10:00:00", ValueKind::Timestamp).unwrap();
        assert_eq!(d.compare(&ts), Some(Ordering::Less));
        assert_eq!(ts.compare(&Value::text("2020-01-05")), Some(Ordering::Greater));
        assert_eq!(Value::text("2020-02-01").compare(&ts), Some(Ordering::Greater));
        assert_eq!(Value::Null.compare(&Value::Null), None);
        assert_eq!(Value::text("a").compare(&Value::Int(1)), None);
    }

    #[test]
    fn month_and_year_keys() {
        let ts = Value::parse_as("2020-01-31T23:59:59", ValueKind::Timestamp).unwrap();
        assert_eq!(ts.month_key().as_deref(), Some("2020-01"));
        assert_eq!(ts.year(), Some(2020));
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(12.0), "12");
        assert_eq!(format_number(0.93), "0.93");
        assert_eq!(format_number(1.0 / 3.0), "0.3333");
        assert_eq!(format_number(-0.00001), "0");
    }
}
