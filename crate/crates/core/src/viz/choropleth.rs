use std::collections::BTreeMap;

use super::geo::RegionGeometry;
use super::series::Series;
use super::svg::{c, escape, mix, Doc, HEIGHT, WIDTH};
use super::{Chart, ChartKind, ChartOptions, Result, VizError};
use crate::store::format_number;

pub const DEFAULT_BINS: usize = 5;
const NEUTRAL: &str = "#eeeeee";
const LIGHT: (u8, u8, u8) = (0xfe, 0xe5, 0xd9);
const DARK: (u8, u8, u8) = (0xa5, 0x0f, 0x15);

/// The `bins - 1` interior quantiles of `values` (linear interpolation
/// between order statistics, i.e. the "type 7" definition).
pub fn quantile_thresholds(values: &[f64], bins: usize) -> Vec<f64> {
    if values.is_empty() || bins < 2 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    (1..bins)
        .map(|i| {
            let h = (n - 1) as f64 * i as f64 / bins as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        })
        .collect()
}

/// Bin index per value: how many thresholds lie strictly below it.
pub fn quantile_bins(values: &[f64], thresholds: &[f64]) -> Vec<usize> {
    values.iter().map(|v| thresholds.iter().filter(|t| **t < *v).count()).collect()
}

fn bin_colour(bin: usize, bins: usize) -> String {
    let t = if bins <= 1 { 1.0 } else { bin as f64 / (bins - 1) as f64 };
    mix(LIGHT, DARK, t)
}

/// Region map filled by quantile bin of `counts` (keyed by region id).
///
/// Regions without a count are drawn in a neutral grey; counted ids that
/// have no geometry are listed as warnings inside the SVG and its sidecar.
pub fn render_choropleth(
    counts: &Series,
    geometry: &RegionGeometry,
    bins: usize,
    opts: &ChartOptions,
) -> Result<Chart> {
    if geometry.regions.is_empty() {
        return Err(VizError::Empty("geometry has no regions".into()));
    }
    let bins = bins.max(1);
    let by_id: BTreeMap<&str, f64> = counts.points.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let warnings: Vec<String> = counts
        .points
        .iter()
        .filter(|(k, _)| !geometry.regions.contains_key(k))
        .map(|(k, _)| format!("no geometry for region {k}"))
        .collect();
    let placed: Vec<(&str, f64)> =
        geometry.regions.keys().filter_map(|id| by_id.get(id.as_str()).map(|v| (id.as_str(), *v))).collect();
    let values: Vec<f64> = placed.iter().map(|p| p.1).collect();
    let thresholds = quantile_thresholds(&values, bins);
    let assigned: BTreeMap<&str, usize> = placed.iter().map(|p| p.0).zip(quantile_bins(&values, &thresholds)).collect();

    let (min_lon, min_lat, max_lon, max_lat) = geometry.bounds().expect("non-empty geometry");
    let mean_lat = (min_lat + max_lat) / 2.0;
    let kx = mean_lat.to_radians().cos().max(1e-6);
    let (map_l, map_t, map_w, map_h) = (20.0, 44.0, WIDTH - 230.0, HEIGHT - 64.0);
    let span_x = ((max_lon - min_lon) * kx).max(1e-9);
    let span_y = (max_lat - min_lat).max(1e-9);
    let scale = (map_w / span_x).min(map_h / span_y);
    let off_x = map_l + (map_w - span_x * scale) / 2.0;
    let off_y = map_t + (map_h - span_y * scale) / 2.0;
    let project = |(lon, lat): (f64, f64)| (off_x + (lon - min_lon) * kx * scale, off_y + (max_lat - lat) * scale);

    let mut doc = Doc::new(WIDTH, HEIGHT, &opts.title);
    doc.line("<g class=\"regions\" stroke=\"#666666\" stroke-width=\"0.6\">");
    for (id, rings) in &geometry.regions {
        let d: Vec<String> = rings
            .iter()
            .map(|ring| {
                let pts: Vec<String> = ring
                    .iter()
                    .map(|p| {
                        let (x, y) = project(*p);
                        format!("{} {}", c(x), c(y))
                    })
                    .collect();
                format!("M{}Z", pts.join(" L"))
            })
            .collect();
        let (fill, label) = match (by_id.get(id.as_str()), assigned.get(id.as_str())) {
            (Some(v), Some(b)) => (bin_colour(*b, bins), format!("{}: {}", id, format_number(*v))),
            _ => (NEUTRAL.to_string(), format!("{id}: no data")),
        };
        doc.line(format!(
            "<path class=\"region\" data-region=\"{}\" d=\"{}\" fill=\"{fill}\" fill-rule=\"evenodd\"><title>{}</title></path>",
            escape(id),
            d.join(" "),
            escape(&label)
        ));
    }
    doc.line("</g>");

    // value labels at the centre of each counted region's largest ring
    doc.line("<g class=\"values\">");
    for (id, v) in &placed {
        let ring = geometry.regions[*id].iter().max_by_key(|r| r.len()).expect("region has rings");
        let (sx, sy) = ring[..ring.len() - 1].iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let m = (ring.len() - 1) as f64;
        let (x, y) = project((sx / m, sy / m));
        doc.text("value", x, y + 3.0, 8, "middle", &format_number(*v));
    }
    doc.line("</g>");

    let legend_x = WIDTH - 190.0;
    doc.line("<g class=\"legend\">");
    doc.text(
        "legend-title",
        legend_x,
        60.0,
        12,
        "start",
        if opts.y_label.is_empty() { "count" } else { &opts.y_label },
    );
    let min = values.iter().copied().reduce(f64::min);
    let max = values.iter().copied().reduce(f64::max);
    for b in 0..bins {
        let lo = if b == 0 { min } else { thresholds.get(b - 1).copied() };
        let hi = if b + 1 == bins { max } else { thresholds.get(b).copied() };
        let range = match (lo, hi) {
            (Some(lo), Some(hi)) => format!("{} – {}", format_number(lo), format_number(hi)),
            _ => "–".to_string(),
        };
        let y = 72.0 + b as f64 * 22.0;
        doc.line(format!(
            "<rect x=\"{}\" y=\"{}\" width=\"16\" height=\"16\" fill=\"{}\" stroke=\"#666666\" stroke-width=\"0.5\"/>",
            c(legend_x),
            c(y),
            bin_colour(b, bins)
        ));
        doc.text("legend-label", legend_x + 22.0, y + 12.0, 11, "start", &range);
    }
    let y = 72.0 + bins as f64 * 22.0;
    doc.line(format!(
        "<rect x=\"{}\" y=\"{}\" width=\"16\" height=\"16\" fill=\"{NEUTRAL}\" stroke=\"#666666\" stroke-width=\"0.5\"/>",
        c(legend_x),
        c(y)
    ));
    doc.text("legend-label", legend_x + 22.0, y + 12.0, 11, "start", "no data");
    doc.line("</g>");
    if !warnings.is_empty() {
        doc.line("<g class=\"warnings\">");
        for (i, w) in warnings.iter().enumerate() {
            doc.text("warning", legend_x, y + 40.0 + 14.0 * i as f64, 10, "start", w);
        }
        doc.line("</g>");
    }

    let table: Vec<serde_json::Value> = geometry
        .regions
        .keys()
        .map(|id| {
            serde_json::json!({
                "region": id,
                "count": by_id.get(id.as_str()),
                "bin": assigned.get(id.as_str()),
            })
        })
        .collect();
    Ok(Chart {
        kind: ChartKind::Choropleth,
        svg: doc.finish(),
        data: serde_json::json!({
            "kind": "choropleth",
            "title": opts.title,
            "bins": bins,
            "thresholds": thresholds,
            "regions": table,
            "warnings": warnings,
        }),
    })
}
