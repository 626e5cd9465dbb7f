//! ISO-8601 parsing shared by CSV ingestion, literals and grouping keys.

use chrono::{DateTime, NaiveDate, NaiveDateTime};

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if s.len() != 10 {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DDThh:mm:ss` (also with a space separator),
/// and RFC 3339 forms with `Z` or a numeric offset, which are shifted to UTC.
pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    if let Some(d) = parse_date(s) {
        return d.and_hms_opt(0, 0, 0);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(ts) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(ts);
        }
    }
    DateTime::parse_from_rfc3339(s).ok().map(|dt| dt.naive_utc())
}

pub fn format_date(d: NaiveDate) -> String {
    d.format("%Y-%m-%d").to_string()
}

pub fn format_timestamp(ts: NaiveDateTime) -> String {
    ts.format("%Y-%m-%dT%H:%M:%S").to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_forms() {
        assert!(parse_date("2020-02-29").is_some());
        assert!(parse_date("2021-02-29").is_none());
        assert!(parse_date("2020-1-5").is_none());
        let ts = parse_timestamp("2020-01-05T10:11:12").unwrap();
        assert_eq!(format_timestamp(ts), "2020-01-05T10:11:12");
        assert_eq!(format_timestamp(parse_timestamp("2020-01-05").unwrap()), "2020-01-05T00:00:00");
        assert_eq!(format_timestamp(parse_timestamp("2020-01-05T10:00:00+06:00").unwrap()), "2020-01-05T04:00:00");
        assert_eq!(format_timestamp(parse_timestamp("2020-01-05T10:00:00Z").unwrap()), "2020-01-05T10:00:00");
        assert!(parse_timestamp("yesterday").is_none());
    }
}
