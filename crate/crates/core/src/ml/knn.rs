//! k-nearest-neighbour classification.

use serde::{Deserialize, Serialize};

use super::features::FeatureMatrix;
use super::kmeans::squared_distance;

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    /// Index into `labels` for each stored point.
    pub classes: Vec<usize>,
    /// Declared class order; earlier labels win vote ties.
    pub labels: Vec<String>,
}

impl KnnModel {
    pub fn fit(features: &FeatureMatrix, classes: Vec<usize>, labels: Vec<String>, k: usize) -> KnnModel {
        KnnModel { k: k.max(1), points: features.rows().map(<[f64]>::to_vec).collect(), classes, labels }
    }

    /// Class index for one query row. Equal distances keep the lower stored
    /// row first; equal vote counts go to the earlier declared label.
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut by_distance: Vec<(f64, usize)> =
            self.points.iter().enumerate().map(|(i, p)| (squared_distance(row, p), i)).collect();
        by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; self.labels.len()];
        for &(_, i) in by_distance.iter().take(self.k.min(self.points.len())) {
            votes[self.classes[i]] += 1;
        }
        let best = votes.iter().copied().max().unwrap_or(0);
        votes.iter().position(|&v| v == best).unwrap_or(0)
    }

    pub fn predict(&self, features: &FeatureMatrix) -> Vec<usize> {
        features.rows().map(|r| self.predict_row(r)).collect()
    }
}
