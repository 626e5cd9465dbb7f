//! Ordinary least squares with an intercept.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::error::{MlError, Result};
use super::features::FeatureMatrix;

/// Diagonal jitter added to the normal equations so rank-deficient designs
/// still have a (minimum-ish norm) solution.
pub const RIDGE_JITTER: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    /// One weight per feature-matrix column.
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }

    pub fn predict(&self, features: &FeatureMatrix) -> Vec<f64> {
        features.rows().map(|r| self.predict_row(r)).collect()
    }
}

/// Solves `(XᵀX + εI) w = Xᵀy` with a leading column of ones in X.
pub fn fit_ols(features: &FeatureMatrix, y: &[f64]) -> Result<LinearModel> {
    let n = features.n_rows();
    if n != y.len() {
        return Err(MlError::Invalid(format!("{n} feature rows but {} targets", y.len())));
    }
    if n == 0 {
        return Err(MlError::Invalid("cannot fit a regression on zero rows".into()));
    }
    let p = features.n_cols() + 1;
    let x = design(features);
    let yv = DVector::from_column_slice(y);
    let mut xtx = x.transpose() * &x;
    for i in 0..p {
        xtx[(i, i)] += RIDGE_JITTER;
    }
    let xty = x.transpose() * yv;
    let solution = match xtx.clone().cholesky() {
        Some(ch) => ch.solve(&xty),
        None => xtx.lu().solve(&xty).ok_or_else(|| MlError::Invalid("normal equations are singular".into()))?,
    };
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(MlError::Invalid("regression produced non-finite weights".into()));
    }
    Ok(LinearModel { intercept: solution[0], weights: solution.iter().skip(1).copied().collect() })
}

/// `‖Xᵀ(Xŵ − y)‖∞` and `‖Xᵀy‖∞` for the intercept-augmented design.
pub fn normal_equation_residual(model: &LinearModel, features: &FeatureMatrix, y: &[f64]) -> (f64, f64) {
    let x = design(features);
    let mut w = vec![model.intercept];
    w.extend(&model.weights);
    let w = DVector::from_vec(w);
    let yv = DVector::from_column_slice(y);
    let resid = x.transpose() * (&x * w - &yv);
    let xty = x.transpose() * yv;
    (resid.amax(), xty.amax())
}

fn design(features: &FeatureMatrix) -> DMatrix<f64> {
    let n = features.n_rows();
    let p = features.n_cols() + 1;
    DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { features.get(i, j - 1) })
}

/// Coefficient of determination, with the constant-target case defined as
/// 1 for a perfect fit and 0 otherwise.
pub fn r_squared(actual: &[f64], predicted: &[f64]) -> f64 {
    let n = actual.len() as f64;
    if actual.is_empty() {
        return 0.0;
    }
    let mean = actual.iter().sum::<f64>() / n;
    let ss_tot: f64 = actual.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = actual.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)).sum();
    let scale = 1.0 + actual.iter().map(|y| y * y).sum::<f64>();
    if ss_tot <= 1e-12 * scale {
        return if ss_res <= 1e-9 * scale { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::features::{Encoding, Provenance};

    fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        let dim = rows.first().map_or(0, Vec::len);
        let prov = (0..dim).map(|j| Provenance { column: format!("x{j}"), encoding: Encoding::Numeric }).collect();
        FeatureMatrix::from_rows(rows, prov).unwrap()
    }

    #[test]
    fn exact_line() {
        let xs: Vec<Vec<f64>> = (0..10).map(|x| vec![x as f64]).collect();
        let y: Vec<f64> = (0..10).map(|x| 2.0 * x as f64 + 1.0).collect();
        let m = fit_ols(&matrix(xs.clone()), &y).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-6);
        assert!((m.intercept - 1.0).abs() < 1e-6);
        assert!((m.predict_row(&[10.0]) - 21.0).abs() < 1e-6);
        let (r, s) = normal_equation_residual(&m, &matrix(xs), &y);
        assert!(r <= 1e-6 * s);
    }

    #[test]
    fn rank_deficient_design_still_solves() {
        let xs: Vec<Vec<f64>> = (0..6).map(|x| vec![x as f64, x as f64]).collect();
        let y: Vec<f64> = (0..6).map(|x| x as f64).collect();
        let m = fit_ols(&matrix(xs), &y).unwrap();
        assert!((m.weights[0] + m.weights[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn r2_edge_cases() {
        assert_eq!(r_squared(&[3.0, 3.0], &[3.0, 3.0]), 1.0);
        assert_eq!(r_squared(&[3.0, 3.0], &[2.0, 3.0]), 0.0);
        assert!((r_squared(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]) - 1.0).abs() < 1e-12);
    }
}
