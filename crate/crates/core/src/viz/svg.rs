//! Small helpers for writing SVG by hand.

use std::fmt::Write;

pub const WIDTH: f64 = 760.0;
pub const HEIGHT: f64 = 420.0;
pub const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\"";

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Coordinates are written with two decimals so output is stable.
pub fn c(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub struct Doc {
    pub body: String,
}

impl Doc {
    pub fn new(width: f64, height: f64, title: &str) -> Doc {
        let mut body = String::new();
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" {FONT}>",
            w = c(width),
            h = c(height)
        );
        let _ = writeln!(body, "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>");
        if !title.is_empty() {
            let _ = writeln!(
                body,
                "<text class=\"title\" x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
                c(width / 2.0),
                escape(title)
            );
        }
        Doc { body }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.body.push_str(s.as_ref());
        self.body.push('\n');
    }

    pub fn text(&mut self, class: &str, x: f64, y: f64, size: u32, anchor: &str, content: &str) {
        self.line(format!(
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" font-size=\"{size}\" text-anchor=\"{anchor}\">{}</text>",
            c(x),
            c(y),
            escape(content)
        ));
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Round tick step near `span / target` from the 1-2-5 family.
pub fn nice_step(span: f64, target: usize) -> f64 {
    if span <= 0.0 {
        return 1.0;
    }
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

/// Value axis from zero (or the data minimum when negative) to a round top.
pub fn value_axis(min: f64, max: f64) -> (f64, f64, f64) {
    let lo = min.min(0.0);
    let hi = if max > lo { max } else { lo + 1.0 };
    let step = nice_step(hi - lo, 5);
    let lo = (lo / step).floor() * step;
    let hi = (hi / step).ceil() * step;
    (lo, hi, step)
}

/// Plot area of a chart with a vertical value axis.
pub struct Frame {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    pub fn y(&self, v: f64) -> f64 {
        self.bottom - (v - self.lo) / (self.hi - self.lo) * (self.bottom - self.top)
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    /// x positions of `n` evenly spaced slots, centred in their bands.
    pub fn slots(&self, n: usize) -> Vec<f64> {
        let band = self.width() / n as f64;
        (0..n).map(|i| self.left + band * (i as f64 + 0.5)).collect()
    }

    /// Draws the value axis with gridlines, the x baseline and axis titles.
    pub fn draw(doc: &mut Doc, min: f64, max: f64, x_label: &str, y_label: &str, rotate_keys: bool) -> Frame {
        let (lo, hi, step) = value_axis(min, max);
        let bottom = if rotate_keys { HEIGHT - 90.0 } else { HEIGHT - 60.0 };
        let f = Frame { left: 70.0, top: 44.0, right: WIDTH - 24.0, bottom, lo, hi };
        doc.line("<g class=\"y-axis\">");
        let ticks = ((hi - lo) / step).round() as usize;
        for i in 0..=ticks {
            let v = lo + step * i as f64;
            let y = f.y(v);
            doc.line(format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#e0e0e0\"/>",
                c(f.left),
                c(y),
                c(f.right),
                c(y)
            ));
            doc.text("tick", f.left - 8.0, y + 4.0, 11, "end", &crate::store::format_number(v));
        }
        doc.line("</g>");
        doc.line(format!(
            "<line class=\"x-axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>",
            c(f.left),
            c(f.y(0.0_f64.max(lo))),
            c(f.right),
            c(f.y(0.0_f64.max(lo)))
        ));
        if !x_label.is_empty() {
            doc.text("axis-title", (f.left + f.right) / 2.0, HEIGHT - 12.0, 12, "middle", x_label);
        }
        if !y_label.is_empty() {
            doc.line(format!(
                "<text class=\"axis-title\" transform=\"translate(18 {}) rotate(-90)\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
                c((f.top + f.bottom) / 2.0),
                escape(y_label)
            ));
        }
        f
    }

    /// One category label under each slot, rotated when there are many.
    pub fn key_labels(&self, doc: &mut Doc, keys: &[&str], xs: &[f64], rotate: bool) {
        doc.line("<g class=\"x-ticks\">");
        for (k, x) in keys.iter().zip(xs) {
            if rotate {
                doc.line(format!(
                    "<text class=\"tick\" transform=\"translate({} {}) rotate(-60)\" font-size=\"10\" text-anchor=\"end\">{}</text>",
                    c(*x + 3.0),
                    c(self.bottom + 10.0),
                    escape(k)
                ));
            } else {
                doc.text("tick", *x, self.bottom + 18.0, 11, "middle", k);
            }
        }
        doc.line("</g>");
    }
}

/// Linear interpolation between two `#rrggbb` colours.
pub fn mix(a: (u8, u8, u8), b: (u8, u8, u8), t: f64) -> String {
    let ch = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(a.0, b.0), ch(a.1, b.1), ch(a.2, b.2))
}

pub const CATEGORY_COLOURS: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers() {
        assert_eq!(escape("a<b & 'c'"), "a&lt;b &amp; &apos;c&apos;");
        assert_eq!(nice_step(100.0, 5), 20.0);
        assert_eq!(value_axis(0.0, 47.0), (0.0, 50.0, 10.0));
        assert_eq!(mix((0, 0, 0), (255, 255, 255), 0.5), "#808080");
        assert_eq!(c(-0.001), "0.00");
    }
}
