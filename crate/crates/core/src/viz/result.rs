use super::bar::render_bar;
use super::scatter::render_cluster_scatter;
use super::series::Series;
use super::{Chart, ChartOptions, Result, VizError};
use crate::ml::{MlResult, TaskKind};

/// The default chart for a model result: a cluster scatter for clusterings,
/// rows per class for classifications and fitted coefficients for
/// predictions.
pub fn render_ml_result(result: &MlResult, title: &str) -> Result<Chart> {
    match result.task {
        TaskKind::Cluster => {
            let c = result
                .clustering
                .as_ref()
                .ok_or_else(|| VizError::Invalid("cluster result without a clustering".into()))?;
            render_cluster_scatter(c, &result.features, &ChartOptions::titled(title))
        }
        TaskKind::Classification => render_bar(
            &Series::from_table(&result.summary, "class", "count")?,
            &ChartOptions::titled(title).axes("class", "rows"),
        ),
        TaskKind::Prediction => render_bar(
            &Series::from_table(&result.summary, "term", "value")?,
            &ChartOptions::titled(title).axes("term", "coefficient"),
        ),
    }
}
