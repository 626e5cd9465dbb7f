use nalgebra::{DMatrix, SymmetricEigen};

use super::svg::{c, escape, Doc, CATEGORY_COLOURS, HEIGHT, WIDTH};
use super::{Chart, ChartKind, ChartOptions, Result, VizError};
use crate::ml::{Clustering, FeatureMatrix};
use crate::store::format_number;

/// Projection of every row onto the top two principal components.
///
/// Each component's sign is fixed so that its first non-zero loading is
/// positive. Components with (numerically) zero variance project to 0, so a
/// rank-1 input lies on the x axis.
pub fn principal_components(features: &FeatureMatrix) -> Vec<(f64, f64)> {
    let (n, d) = (features.n_rows(), features.n_cols());
    if n == 0 || d == 0 {
        return vec![(0.0, 0.0); n];
    }
    let mut x = DMatrix::from_fn(n, d, |i, j| features.get(i, j));
    for j in 0..d {
        let mean = x.column(j).mean();
        x.column_mut(j).add_scalar_mut(-mean);
    }
    // eigen-decompose whichever of XᵀX (d×d) and XXᵀ (n×n) is smaller
    let (values, loadings) = if d <= n {
        let eig = SymmetricEigen::new(x.transpose() * &x);
        (eig.eigenvalues, eig.eigenvectors)
    } else {
        let eig = SymmetricEigen::new(&x * x.transpose());
        let mut v = x.transpose() * &eig.eigenvectors;
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            let s = lambda.max(0.0).sqrt();
            if s > 0.0 {
                v.column_mut(k).scale_mut(1.0 / s);
            } else {
                v.column_mut(k).fill(0.0);
            }
        }
        (eig.eigenvalues, v)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|a, b| values[*b].total_cmp(&values[*a]).then(a.cmp(b)));
    let top = values[order[0]].max(0.0);
    let mut out = vec![(0.0, 0.0); n];
    for (slot, &k) in order.iter().take(2).enumerate() {
        if values[k] <= 1e-12 * top || top == 0.0 {
            continue;
        }
        let mut v = loadings.column(k).into_owned();
        let norm = v.norm();
        if norm == 0.0 {
            continue;
        }
        v /= norm;
        if let Some(first) = v.iter().find(|w| w.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        let proj = &x * v;
        for (i, p) in proj.iter().enumerate() {
            let p = if p.abs() < 1e-12 { 0.0 } else { *p };
            if slot == 0 {
                out[i].0 = p;
            } else {
                out[i].1 = p;
            }
        }
    }
    out
}

/// Scatter of the rows in principal-component space, coloured by cluster,
/// with a legend listing each cluster's size.
pub fn render_cluster_scatter(clustering: &Clustering, features: &FeatureMatrix, opts: &ChartOptions) -> Result<Chart> {
    let n = features.n_rows();
    if n < 2 {
        return Err(VizError::Empty(format!("need at least 2 rows to plot, got {n}")));
    }
    if clustering.assignments.len() != n {
        return Err(VizError::Invalid(format!("{} cluster assignments for {n} rows", clustering.assignments.len())));
    }
    let pts = principal_components(features);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    let pad = |lo: f64, hi: f64| {
        if hi - lo < 1e-12 {
            (lo - 1.0, hi + 1.0)
        } else {
            (lo - (hi - lo) * 0.05, hi + (hi - lo) * 0.05)
        }
    };
    let ((x0, x1), (y0, y1)) = (pad(x0, x1), pad(y0, y1));
    let (left, top, right, bottom) = (50.0, 44.0, WIDTH - 170.0, HEIGHT - 50.0);
    let sx = |v: f64| left + (v - x0) / (x1 - x0) * (right - left);
    let sy = |v: f64| bottom - (v - y0) / (y1 - y0) * (bottom - top);

    let mut doc = Doc::new(WIDTH, HEIGHT, &opts.title);
    doc.line(format!(
        "<rect class=\"plot\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999999\"/>",
        c(left),
        c(top),
        c(right - left),
        c(bottom - top)
    ));
    let x_label = if opts.x_label.is_empty() { "PC1" } else { &opts.x_label };
    let y_label = if opts.y_label.is_empty() { "PC2" } else { &opts.y_label };
    doc.text("axis-title", (left + right) / 2.0, HEIGHT - 18.0, 12, "middle", x_label);
    doc.line(format!(
        "<text class=\"axis-title\" transform=\"translate(22 {}) rotate(-90)\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        c((top + bottom) / 2.0),
        escape(y_label)
    ));
    doc.line("<g class=\"points\">");
    for (i, ((x, y), cl)) in pts.iter().zip(&clustering.assignments).enumerate() {
        doc.line(format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\" fill-opacity=\"0.8\"><title>row {i}: cluster {cl}</title></circle>",
            c(sx(*x)),
            c(sy(*y)),
            CATEGORY_COLOURS[cl % CATEGORY_COLOURS.len()]
        ));
    }
    doc.line("</g>");

    let sizes = clustering.sizes();
    let lx = WIDTH - 150.0;
    doc.line("<g class=\"legend\">");
    doc.text("legend-title", lx, 60.0, 12, "start", "cluster (size)");
    for (k, size) in sizes.iter().enumerate() {
        let y = 78.0 + 20.0 * k as f64;
        doc.line(format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"{}\"/>",
            c(lx + 6.0),
            c(y - 4.0),
            CATEGORY_COLOURS[k % CATEGORY_COLOURS.len()]
        ));
        doc.text("legend-label", lx + 18.0, y, 11, "start", &format!("{k} ({})", format_number(*size as f64)));
    }
    doc.line("</g>");

    let points: Vec<serde_json::Value> = pts
        .iter()
        .zip(&clustering.assignments)
        .map(|((x, y), cl)| serde_json::json!({"x": x, "y": y, "cluster": cl}))
        .collect();
    Ok(Chart {
        kind: ChartKind::ClusterScatter,
        svg: doc.finish(),
        data: serde_json::json!({
            "kind": "cluster_scatter",
            "title": opts.title,
            "k": clustering.k,
            "sizes": sizes,
            "points": points,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{kmeans, Encoding, Provenance};

    fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        let width = rows.first().map_or(0, Vec::len);
        let prov = (0..width).map(|j| Provenance { column: format!("x{j}"), encoding: Encoding::Numeric }).collect();
        FeatureMatrix::from_rows(rows, prov).unwrap()
    }

    #[test]
    fn rank_one_input_lies_on_a_line() {
        let m = matrix((0..6).map(|i| vec![i as f64, 2.0 * i as f64, 0.0]).collect());
        let pts = principal_components(&m);
        assert!(pts.iter().all(|p| p.1 == 0.0));
        // first loading positive, so x increases with the row index
        assert!(pts.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn wide_and_tall_routes_agree() {
        let rows = vec![vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 1.0], vec![4.0, 1.0, 0.0]];
        let tall = principal_components(&matrix(rows.clone()));
        // append zero columns to force the n×n route
        let wide = principal_components(&matrix(
            rows.into_iter()
                .map(|mut r| {
                    r.extend([0.0; 3]);
                    r
                })
                .collect(),
        ));
        for (a, b) in tall.iter().zip(&wide) {
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn legend_lists_sizes() {
        let m = matrix(vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![5.0, 5.0], vec![5.1, 5.0], vec![5.0, 5.2]]);
        let cl = kmeans(&m, 2, 42).unwrap();
        let chart = render_cluster_scatter(&cl, &m, &ChartOptions::titled("Clusters")).unwrap();
        assert!(chart.svg.contains(">0 (2)</text>") && chart.svg.contains(">1 (3)</text>"));
        assert_eq!(chart.svg.matches("<title>row").count(), 5);
        let one = matrix(vec![vec![1.0]]);
        let single = kmeans(&one, 1, 42).unwrap();
        assert!(matches!(render_cluster_scatter(&single, &one, &ChartOptions::default()), Err(VizError::Empty(_))));
    }
}
