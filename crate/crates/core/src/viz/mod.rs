//! Self-contained SVG charts: trend lines, bar charts, choropleth maps and
//! cluster scatter plots.
//!
//! Renderers are pure: the same input always yields the same bytes. Every
//! plotted value is also written as a text node (formatted with
//! [`format_number`](crate::store::format_number)) so artifacts can be
//! searched and checked without parsing geometry. Each chart carries a JSON
//! sidecar with the data it shows.

mod bar;
mod choropleth;
mod geo;
mod result;
mod scatter;
mod series;
mod svg;
mod trend;

use serde::Serialize;
use thiserror::Error;

pub use bar::render_bar;
pub use choropleth::{quantile_bins, quantile_thresholds, render_choropleth, DEFAULT_BINS};
pub use geo::RegionGeometry;
pub use result::render_ml_result;
pub use scatter::{principal_components, render_cluster_scatter};
pub use series::Series;
pub use trend::render_trend;

#[derive(Debug, Error, PartialEq)]
pub enum VizError {
    #[error("nothing to plot: {0}")]
    Empty(String),
    #[error("invalid chart input: {0}")]
    Invalid(String),
    #[error("geometry error: {0}")]
    Geometry(String),
}

pub type Result<T, E = VizError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Trend,
    Bar,
    Choropleth,
    ClusterScatter,
}

impl ChartKind {
    pub fn name(self) -> &'static str {
        match self {
            ChartKind::Trend => "trend",
            ChartKind::Bar => "bar",
            ChartKind::Choropleth => "choropleth",
            ChartKind::ClusterScatter => "cluster_scatter",
        }
    }
}

/// A rendered chart and the data behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub kind: ChartKind,
    pub svg: String,
    /// Sidecar document written next to the SVG.
    pub data: serde_json::Value,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ChartOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl ChartOptions {
    pub fn titled(title: &str) -> Self {
        ChartOptions { title: title.to_string(), ..Default::default() }
    }

    pub fn axes(mut self, x: &str, y: &str) -> Self {
        self.x_label = x.to_string();
        self.y_label = y.to_string();
        self
    }
}
