//! Planted datasets whose true structure is known by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rows with the labels they were generated from.
#[derive(Debug, Clone)]
pub struct Planted<L> {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<L>,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Three well-separated isotropic Gaussian blobs in the plane.
pub fn blobs(per_cluster: usize, seed: u64) -> Planted<usize> {
    const CENTRES: [(f64, f64); 3] = [(0.0, 0.0), (12.0, 12.0), (-12.0, 12.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..per_cluster * CENTRES.len() {
        // interleave so cluster membership is unrelated to row order
        let c = i % CENTRES.len();
        rows.push(vec![CENTRES[c].0 + normal(&mut rng), CENTRES[c].1 + normal(&mut rng)]);
        labels.push(c);
    }
    Planted { rows, labels }
}

/// `y = intercept + Σ wᵢ xᵢ` exactly, with `xᵢ` uniform on [-5, 5).
pub fn linear(n: usize, weights: &[f64], intercept: f64, seed: u64) -> Planted<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| weights.iter().map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
    let labels = rows.iter().map(|x| intercept + x.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>()).collect();
    Planted { rows, labels }
}

/// Two classes split by the sign of the first feature, with each label
/// flipped independently with probability `flip`. No classifier can expect
/// to beat `1 - flip` accuracy on fresh rows.
pub fn noisy_classes(n: usize, flip: f64, seed: u64) -> Planted<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..n {
        let x = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let mut positive = x[0] > 0.0;
        if rng.random_bool(flip) {
            positive = !positive;
        }
        labels.push(if positive { "pos" } else { "neg" }.to_string());
        rows.push(x);
    }
    Planted { rows, labels }
}

/// CSV text for numeric rows plus one extra trailing column.
pub fn to_csv<L: ToString>(header: &[&str], planted: &Planted<L>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).unwrap();
    for (row, label) in planted.rows.iter().zip(&planted.labels) {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        rec.push(label.to_string());
        w.write_record(&rec).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
