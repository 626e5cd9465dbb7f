//! Partition agreement and order statistics.

use std::collections::HashMap;

fn choose2(n: u64) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index of two labelings of the same items (Hubert & Arabie).
/// Identical partitions score 1 regardless of label names.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings differ in length");
    let n = a.len() as u64;
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *joint.entry((*x, *y)).or_default() += 1;
        *rows.entry(*x).or_default() += 1;
        *cols.entry(*y).or_default() += 1;
    }
    let index: f64 = joint.values().map(|c| choose2(*c)).sum();
    let sum_a: f64 = rows.values().map(|c| choose2(*c)).sum();
    let sum_b: f64 = cols.values().map(|c| choose2(*c)).sum();
    let total = choose2(n);
    if total == 0.0 {
        return 1.0;
    }
    let expected = sum_a * sum_b / total;
    let max = (sum_a + sum_b) / 2.0;
    if (max - expected).abs() < f64::EPSILON {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// Sample quantile at probability `p`: linear interpolation between the
/// order statistics at position `(n - 1) p`.
pub fn quantile_type7(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Brute-force bin per value: count the interior quantile cut points
/// (at `1/bins, 2/bins, …`) that lie strictly below the value.
pub fn quantile_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let cuts: Vec<f64> = (1..bins).map(|i| quantile_type7(values, i as f64 / bins as f64)).collect();
    values
        .iter()
        .map(|v| {
            let mut b = 0;
            for c in &cuts {
                if c < v {
                    b += 1;
                }
            }
            b
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ari_known_values() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[5, 5, 2, 2]), 1.0);
        // classic example: 2 + 2 split against 3 + 1
        let v = adjusted_rand_index(&[0, 0, 1, 1], &[0, 0, 0, 1]);
        assert!((v - 0.0).abs() < 1e-12, "{v}");
        let v = adjusted_rand_index(&[0, 0, 0, 1, 1, 1], &[0, 0, 1, 1, 2, 2]);
        assert!((v - 0.24242424242424243).abs() < 1e-12, "{v}");
    }

    #[test]
    fn type7_matches_textbook() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_type7(&v, 0.5), 2.5);
        assert_eq!(quantile_type7(&v, 0.25), 1.75);
        assert_eq!(quantile_bins(&[10.0, 1.0, 1.0, 1.0], 5), vec![4, 0, 0, 0]);
    }
}
