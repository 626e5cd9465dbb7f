use super::series::Series;
use super::svg::{c, escape, Doc, Frame, HEIGHT, WIDTH};
use super::{Chart, ChartKind, ChartOptions, Result, VizError};
use crate::store::format_number;

/// Line plot of a series in key order.
pub fn render_trend(series: &Series, opts: &ChartOptions) -> Result<Chart> {
    if series.is_empty() {
        return Err(VizError::Empty(format!("series {} has no points", series.name)));
    }
    let mut doc = Doc::new(WIDTH, HEIGHT, &opts.title);
    let n = series.len();
    let rotate = n > 12;
    let frame =
        Frame::draw(&mut doc, series.min().unwrap(), series.max().unwrap(), &opts.x_label, &opts.y_label, rotate);
    let xs = frame.slots(n);
    let keys: Vec<&str> = series.points.iter().map(|(k, _)| k.as_str()).collect();
    frame.key_labels(&mut doc, &keys, &xs, rotate);

    let path: Vec<String> = series
        .points
        .iter()
        .zip(&xs)
        .enumerate()
        .map(|(i, ((_, v), x))| format!("{}{} {}", if i == 0 { "M" } else { "L" }, c(*x), c(frame.y(*v))))
        .collect();
    doc.line(format!(
        "<path class=\"line\" d=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>",
        path.join(" ")
    ));
    doc.line("<g class=\"points\">");
    let value_size = if n > 24 { 7 } else { 10 };
    for ((k, v), x) in series.points.iter().zip(&xs) {
        let y = frame.y(*v);
        doc.line(format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#c0392b\"><title>{}: {}</title></circle>",
            c(*x),
            c(y),
            escape(k),
            format_number(*v)
        ));
        doc.text("value", *x, y - 7.0, value_size, "middle", &format_number(*v));
    }
    doc.line("</g>");
    Ok(Chart {
        kind: ChartKind::Trend,
        svg: doc.finish(),
        data: serde_json::json!({"kind": "trend", "title": opts.title, "series": series.sidecar()}),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn months() -> Series {
        Series::new("count", vec![("2020-01".into(), 4.0), ("2020-02".into(), 1.0), ("2020-03".into(), 12.0)]).unwrap()
    }

    #[test]
    fn tick_labels_and_values_are_text() {
        let chart = render_trend(&months(), &ChartOptions::titled("Monthly incidents")).unwrap();
        for label in ["2020-01", "2020-02", "2020-03"] {
            assert!(chart.svg.contains(&format!(">{label}</text>")), "{label}");
        }
        assert!(chart.svg.contains(">12</text>"));
        assert!(chart.svg.contains(">Monthly incidents</text>"));
    }

    #[test]
    fn single_point_and_determinism() {
        let one = Series::new("count", vec![("2021".into(), 3.0)]).unwrap();
        assert!(render_trend(&one, &ChartOptions::default()).is_ok());
        let a = render_trend(&months(), &ChartOptions::default()).unwrap();
        let b = render_trend(&months(), &ChartOptions::default()).unwrap();
        assert_eq!(a.svg, b.svg);
        let empty = Series::new("count", vec![]).unwrap();
        assert!(matches!(render_trend(&empty, &ChartOptions::default()), Err(VizError::Empty(_))));
    }
}
