//! Renders each chart kind to SVG: a trend line, a bar chart and a
//! choropleth over the bundled district outlines.
//!
//! ```text
//! cargo run -p inquest-core --example render_charts -- [out-dir]
//! ```

use inquest::fixture::{district_geojson, generate, PROTHOMALO};
use inquest::store::{run_aggregation, Aggregate, AggregationPlan, GroupKey};
use inquest::viz::{render_bar, render_choropleth, render_trend, ChartOptions, RegionGeometry, Series, DEFAULT_BINS};
use inquest::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "charts".into()));
    std::fs::create_dir_all(&out)?;
    let dir = tempfile::tempdir()?;
    let registry = Registry::open(generate(300, 42).write(dir.path())?.manifest)?;

    let monthly = run_aggregation(
        &AggregationPlan::new(PROTHOMALO)
            .group(GroupKey::Month("last-published-at".into()))
            .aggregate(Aggregate::count_all()),
        &registry,
    )?;
    let trend = render_trend(
        &Series::from_table(&monthly, "month", "count")?,
        &ChartOptions::titled("Reports per month").axes("month", "reports"),
    )?;

    let districts = run_aggregation(
        &AggregationPlan::new(PROTHOMALO)
            .group(GroupKey::Column("district-tag".into()))
            .aggregate(Aggregate::count_all())
            .sort_by("count", true),
        &registry,
    )?;
    let counts = Series::from_table(&districts, "district-tag", "count")?;
    let bar = render_bar(&counts, &ChartOptions::titled("Reports per district").axes("district", "reports"))?;
    let geometry = RegionGeometry::from_geojson(&district_geojson(), "name")?;
    let map = render_choropleth(&counts, &geometry, DEFAULT_BINS, &ChartOptions::titled("Hot spots"))?;

    for chart in [trend, bar, map] {
        let path = out.join(format!("{}.svg", chart.kind.name()));
        std::fs::write(&path, &chart.svg)?;
        println!("{:<16} {} bytes -> {}", chart.kind.name(), chart.svg.len(), path.display());
    }
    Ok(())
}
