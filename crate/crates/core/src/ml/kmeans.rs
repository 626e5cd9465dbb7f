//! Lloyd's k-means with seeded k-means++ initialization.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::error::{MlError, Result};
use super::features::FeatureMatrix;

pub const MAX_ITERATIONS: usize = 100;
pub const CONVERGENCE_SHIFT: f64 = 1e-6;
/// Independent k-means++ starts; the run with the lowest final inertia wins.
pub const RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub k: usize,
    /// Cluster id per row, dense in `[0, k)` and numbered by first occurrence.
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after every assignment step, ending with the final one.
    pub inertia_history: Vec<f64>,
}

impl Clustering {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }

    /// True when no step raised the inertia beyond float noise.
    pub fn inertia_non_increasing(&self) -> bool {
        self.inertia_history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0))
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Index of the centroid nearest to `point`; ties go to the lower index.
pub fn nearest_centroid(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    nearest(point, centroids).0
}

pub fn kmeans(features: &FeatureMatrix, k: usize, seed: u64) -> Result<Clustering> {
    let n = features.n_rows();
    if k == 0 {
        return Err(MlError::Invalid("cluster count must be at least 1".into()));
    }
    if k > n {
        return Err(MlError::Invalid(format!("cannot form {k} clusters from {n} rows")));
    }
    let distinct = features.rows().map(|r| r.iter().map(|x| x.to_bits()).collect::<Vec<_>>()).collect::<HashSet<_>>();
    if k > distinct.len() {
        return Err(MlError::Invalid(format!(
            "cannot form {k} clusters from {} distinct feature rows",
            distinct.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Clustering> = None;
    for _ in 0..RESTARTS {
        let run = lloyd(features, k, &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// One seeded k-means++ start followed by Lloyd iterations.
fn lloyd(features: &FeatureMatrix, k: usize, rng: &mut ChaCha8Rng) -> Clustering {
    let mut centroids = init_plus_plus(features, k, rng);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut assignments;
    loop {
        let (a, inertia) = assign(features, &centroids);
        assignments = a;
        history.push(inertia);
        if iterations == MAX_ITERATIONS {
            break;
        }
        iterations += 1;
        let updated = update(features, &assignments, &centroids);
        let shift = centroids.iter().zip(&updated).map(|(a, b)| squared_distance(a, b).sqrt()).fold(0.0, f64::max);
        centroids = updated;
        if shift < CONVERGENCE_SHIFT {
            let (a, inertia) = assign(features, &centroids);
            assignments = a;
            history.push(inertia);
            break;
        }
    }

    // renumber clusters by first occurrence so ids do not depend on init order
    let mut remap = vec![usize::MAX; k];
    let mut next = 0;
    for &a in &assignments {
        if remap[a] == usize::MAX {
            remap[a] = next;
            next += 1;
        }
    }
    for slot in remap.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = next;
        next += 1;
    }
    let mut ordered = vec![Vec::new(); k];
    for (old, c) in centroids.into_iter().enumerate() {
        ordered[remap[old]] = c;
    }
    let assignments: Vec<usize> = assignments.into_iter().map(|a| remap[a]).collect();
    Clustering {
        k,
        assignments,
        centroids: ordered,
        inertia: *history.last().expect("at least one assignment"),
        iterations,
        inertia_history: history,
    }
}

fn init_plus_plus(features: &FeatureMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = features.n_rows();
    let mut centroids = vec![features.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = features.rows().map(|r| squared_distance(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in d2.iter().enumerate() {
            acc += w;
            if w > 0.0 && acc > target {
                pick = Some(i);
                break;
            }
        }
        // rounding can leave the target past the running sum
        let pick = pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).expect("k <= distinct rows"));
        let c = features.row(pick).to_vec();
        for (i, row) in features.rows().enumerate() {
            d2[i] = d2[i].min(squared_distance(row, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn assign(features: &FeatureMatrix, centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut inertia = 0.0;
    let assignments = features
        .rows()
        .map(|r| {
            let (j, d) = nearest(r, centroids);
            inertia += d;
            j
        })
        .collect();
    (assignments, inertia)
}

/// Cluster means. An empty cluster is moved onto the point farthest from its
/// current centroid, so every cluster stays populated.
fn update(features: &FeatureMatrix, assignments: &[usize], previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = previous.len();
    let dim = features.n_cols();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (row, &a) in features.rows().zip(assignments) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(row) {
            *s += x;
        }
    }
    let mut taken = HashSet::new();
    for j in 0..k {
        if counts[j] > 0 {
            let c = counts[j] as f64;
            sums[j].iter_mut().for_each(|s| *s /= c);
            continue;
        }
        let far = (0..features.n_rows())
            .filter(|i| !taken.contains(i))
            .map(|i| (i, squared_distance(features.row(i), &previous[assignments[i]])))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        taken.insert(far.0);
        sums[j] = features.row(far.0).to_vec();
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::features::{Encoding, Provenance};

    fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        let dim = rows[0].len();
        let prov = (0..dim).map(|j| Provenance { column: format!("x{j}"), encoding: Encoding::Numeric }).collect();
        FeatureMatrix::from_rows(rows, prov).unwrap()
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let m = matrix(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![4.0, 3.0]]);
        let c = kmeans(&m, 1, 42).unwrap();
        assert_eq!(c.assignments, vec![0, 0, 0]);
        assert!((c.centroids[0][0] - 2.0).abs() < 1e-12);
        assert!((c.centroids[0][1] - 1.0).abs() < 1e-12);
        // squared distances to (2,1): 5 + 1 + 8
        assert!((c.inertia - 14.0).abs() < 1e-9);
    }

    #[test]
    fn k_equals_n_has_zero_inertia() {
        let m = matrix(vec![vec![0.0], vec![1.0], vec![5.0], vec![9.0]]);
        let c = kmeans(&m, 4, 7).unwrap();
        assert_eq!(c.inertia, 0.0);
        assert_eq!(c.assignments, vec![0, 1, 2, 3]);
    }

    #[test]
    fn too_many_clusters() {
        let m = matrix(vec![vec![1.0], vec![1.0], vec![2.0]]);
        assert!(kmeans(&m, 4, 1).is_err());
        assert!(kmeans(&m, 3, 1).is_err());
        assert!(kmeans(&m, 0, 1).is_err());
        assert!(kmeans(&m, 2, 1).is_ok());
    }

    #[test]
    fn deterministic_and_monotone() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![(i * 7 % 13) as f64, (i * 3 % 11) as f64]).collect();
        let m = matrix(rows);
        let a = kmeans(&m, 4, 42).unwrap();
        let b = kmeans(&m, 4, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.inertia_non_increasing(), "{:?}", a.inertia_history);
    }
}
