//! Minimal self-contained SVG line plots.
//!
//! Population traces, ramp profiles, and sweep curves need nothing more
//! than axes, ticks, a few polylines, and a legend, so the renderer is
//! native — no plotting runtime, no external assets, deterministic
//! output (fixed precision, no timestamps).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// One named trace.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A single-panel line chart.
#[derive(Clone, Debug)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub width: u32,
    pub height: u32,
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        return format!("{v:.2e}");
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

impl LinePlot {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            width: 800,
            height: 480,
        }
    }

    pub fn series(&mut self, label: impl Into<String>, points: Vec<(f64, f64)>) -> &mut Self {
        self.series.push(Series {
            label: label.into(),
            points,
        });
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut x0 = f64::INFINITY;
        let mut x1 = f64::NEG_INFINITY;
        let mut y0 = f64::INFINITY;
        let mut y1 = f64::NEG_INFINITY;
        for s in &self.series {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() {
                    x0 = x0.min(x);
                    x1 = x1.max(x);
                    y0 = y0.min(y);
                    y1 = y1.max(y);
                }
            }
        }
        if !x0.is_finite() {
            (0.0, 1.0, 0.0, 1.0)
        } else {
            // Pad degenerate ranges so every point is drawable.
            if x0 == x1 {
                x0 -= 0.5;
                x1 += 0.5;
            }
            if y0 == y1 {
                y0 -= 0.5;
                y1 += 0.5;
            }
            let pad = 0.04 * (y1 - y0);
            (x0, x1, y0 - pad, y1 + pad)
        }
    }

    /// Render the chart.
    pub fn to_svg(&self) -> String {
        let (w, h) = (self.width as f64, self.height as f64);
        let (ml, mr, mt, mb) = (78.0, 18.0, 42.0, 56.0);
        let (pw, ph) = (w - ml - mr, h - mt - mb);
        let (x0, x1, y0, y1) = self.bounds();
        let px = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
        let py = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif">"#,
            self.width, self.height, self.width, self.height
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
            ml + pw / 2.0,
            xml_escape(&self.title)
        );

        // Grid and ticks (5 divisions per axis).
        for i in 0..=5 {
            let fx = x0 + (x1 - x0) * i as f64 / 5.0;
            let fy = y0 + (y1 - y0) * i as f64 / 5.0;
            let gx = px(fx);
            let gy = py(fy);
            let _ = writeln!(
                s,
                r##"<line x1="{gx:.1}" y1="{mt:.1}" x2="{gx:.1}" y2="{:.1}" stroke="#dddddd" stroke-width="1"/>"##,
                mt + ph
            );
            let _ = writeln!(
                s,
                r##"<line x1="{ml:.1}" y1="{gy:.1}" x2="{:.1}" y2="{gy:.1}" stroke="#dddddd" stroke-width="1"/>"##,
                ml + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{gx:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
                mt + ph + 16.0,
                fmt_tick(fx)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
                ml - 6.0,
                gy + 4.0,
                fmt_tick(fy)
            );
        }
        // Axes.
        let _ = writeln!(
            s,
            r##"<rect x="{ml:.1}" y="{mt:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#333333" stroke-width="1"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
            ml + pw / 2.0,
            h - 12.0,
            xml_escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            mt + ph / 2.0,
            mt + ph / 2.0,
            xml_escape(&self.y_label)
        );

        // Traces.
        for (i, ser) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut pts = String::new();
            for &(x, y) in &ser.points {
                if x.is_finite() && y.is_finite() {
                    let _ = write!(pts, "{:.2},{:.2} ", px(x), py(y));
                }
            }
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
                pts.trim_end()
            );
        }

        // Legend, top-right inside the frame.
        for (i, ser) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let ly = mt + 16.0 + 16.0 * i as f64;
            let lx = ml + pw - 150.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
                lx + 22.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
                lx + 28.0,
                ly + 4.0,
                xml_escape(&ser.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_svg())?;
        Ok(())
    }
}

fn xml_escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_frame_traces_and_legend() {
        let mut p = LinePlot::new("demo", "t (s)", "population");
        p.series("a", vec![(0.0, 0.0), (1.0, 1.0)]);
        p.series("b", vec![(0.0, 1.0), (1.0, 0.0)]);
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("demo"));
        assert!(svg.contains("population"));
        // Legend entries present.
        assert!(svg.contains(">a</text>"));
        assert!(svg.contains(">b</text>"));
    }

    #[test]
    fn degenerate_and_empty_data_no_nan() {
        let mut p = LinePlot::new("flat", "x", "y");
        p.series("const", vec![(2.0, 5.0), (2.0, 5.0)]);
        let svg = p.to_svg();
        assert!(!svg.contains("NaN"));
        let empty = LinePlot::new("none", "x", "y").to_svg();
        assert!(!empty.contains("NaN"));
    }

    #[test]
    fn tick_formatting() {
        assert_eq!(fmt_tick(0.0), "0");
        assert_eq!(fmt_tick(0.25), "0.25");
        assert_eq!(fmt_tick(3.57e-7), "3.57e-7");
        assert_eq!(fmt_tick(12345.0), "1.23e4");
    }

    #[test]
    fn labels_are_escaped() {
        let p = LinePlot::new("a < b & c", "x", "y");
        let svg = p.to_svg();
        assert!(svg.contains("a &lt; b &amp; c"));
    }
}
