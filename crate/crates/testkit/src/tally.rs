//! Row-by-row counting straight from CSV text.

use std::collections::BTreeMap;

/// Parsed CSV as header plus string rows.
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn parse(text: &str) -> Csv {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().expect("header").iter().map(str::to_string).collect();
        let rows = r.records().map(|rec| rec.expect("record").iter().map(str::to_string).collect()).collect();
        Csv { header, rows }
    }

    pub fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    /// Count of rows per value of `column`, after `key` maps each cell.
    pub fn tally_by(&self, column: &str, key: impl Fn(&str) -> String) -> BTreeMap<String, u64> {
        let i = self.col(column);
        let mut out = BTreeMap::new();
        for row in &self.rows {
            if row[i].is_empty() {
                continue;
            }
            *out.entry(key(&row[i])).or_insert(0) += 1;
        }
        out
    }

    pub fn tally(&self, column: &str) -> BTreeMap<String, u64> {
        self.tally_by(column, str::to_string)
    }

    /// Rows per `YYYY-MM`, read from the first seven characters of an ISO date.
    pub fn monthly(&self, column: &str) -> BTreeMap<String, u64> {
        self.tally_by(column, |s| s[..7].to_string())
    }

    /// Indices of rows whose `column` equals `value` exactly.
    pub fn rows_where(&self, column: &str, value: &str) -> Vec<usize> {
        let i = self.col(column);
        (0..self.rows.len()).filter(|r| self.rows[*r][i] == value).collect()
    }
}
