//! Anti-hallucination check: every number in a text must come from the
//! tables it describes.

/// Numbers written in `text`: digit runs with an optional decimal part.
pub fn numbers_in(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            // a minus sign directly before the digits belongs to the number
            let signed =
                start > 0 && chars[start - 1] == '-' && (start < 2 || !chars[start - 2].is_ascii_alphanumeric());
            let from = if signed { start - 1 } else { start };
            out.push(chars[from..i].iter().collect());
        } else {
            i += 1;
        }
    }
    out
}

/// Numbers in `text` not supported by `tables` (each row-major, cells as
/// displayed). Supported values: any number inside any cell, any table's
/// row count, and any column total.
pub fn unsupported_numbers(text: &str, tables: &[Vec<Vec<String>>]) -> Vec<String> {
    let mut allowed: Vec<f64> = Vec::new();
    for t in tables {
        allowed.push(t.len() as f64);
        let width = t.iter().map(Vec::len).max().unwrap_or(0);
        for j in 0..width {
            let cells: Vec<Option<f64>> =
                t.iter().map(|r| r.get(j).and_then(|c| c.trim().parse::<f64>().ok())).collect();
            if !cells.is_empty() && cells.iter().all(Option::is_some) {
                allowed.push(cells.iter().map(|c| c.unwrap()).sum());
            }
        }
        for row in t {
            for cell in row {
                allowed.extend(numbers_in(cell).iter().filter_map(|n| n.parse::<f64>().ok()));
                allowed.extend(numbers_in(cell).iter().filter_map(|n| n.trim_start_matches('-').parse::<f64>().ok()));
            }
        }
    }
    numbers_in(text)
        .into_iter()
        .filter(|n| {
            let v: f64 = n.parse().unwrap_or(f64::NAN);
            // four decimals is the finest precision values are shown with
            !allowed.iter().any(|a| (a - v).abs() <= 5e-5 + 1e-9 * a.abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect()
    }

    #[test]
    fn cells_counts_and_totals_are_supported() {
        let table = t(&[&["2020-01", "4"], &["2020-02", "9"]]);
        assert_eq!(numbers_in("peak 2020-02 with 9, total 13.5"), ["2020", "02", "9", "13.5"]);
        assert!(
            unsupported_numbers("2 months, 13 in all, peak 2020-02 with 9", std::slice::from_ref(&table)).is_empty()
        );
        assert_eq!(unsupported_numbers("peak of 10", &[table]), ["10"]);
        assert_eq!(unsupported_numbers("value -0.25", &[t(&[&["x", "-0.25"]])]), Vec::<String>::new());
    }
}
