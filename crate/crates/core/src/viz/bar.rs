use super::series::Series;
use super::svg::{c, escape, Doc, Frame, HEIGHT, WIDTH};
use super::{Chart, ChartKind, ChartOptions, Result, VizError};
use crate::store::format_number;

/// Vertical bars in key order, each labelled with its value.
pub fn render_bar(series: &Series, opts: &ChartOptions) -> Result<Chart> {
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

    let band = frame.width() / n as f64;
    let bar = (band * 0.7).min(60.0);
    let base = frame.y(0.0);
    doc.line("<g class=\"bars\">");
    for ((k, v), x) in series.points.iter().zip(&xs) {
        let y = frame.y(*v);
        let (top, h) = if y <= base { (y, base - y) } else { (base, y - base) };
        doc.line(format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#2c7fb8\"><title>{}: {}</title></rect>",
            c(x - bar / 2.0),
            c(top),
            c(bar),
            c(h),
            escape(k),
            format_number(*v)
        ));
        doc.text("value", *x, top - 5.0, if n > 24 { 7 } else { 10 }, "middle", &format_number(*v));
    }
    doc.line("</g>");
    Ok(Chart {
        kind: ChartKind::Bar,
        svg: doc.finish(),
        data: serde_json::json!({"kind": "bar", "title": opts.title, "series": series.sidecar()}),
    })
}
