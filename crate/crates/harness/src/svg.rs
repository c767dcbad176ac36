//! Minimal static SVG line plots for the scenario outputs. Deliberately
//! small: fixed canvas, a handful of series colors, linear axes with
//! range labels. Points are thinned to keep files compact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 40.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const MAX_POINTS: usize = 2400;

/// One plotted series.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

impl<'a> Series<'a> {
    pub fn from_samples(label: &'a str, samples: &[f64], sample_rate: f64) -> Self {
        Series {
            label,
            points: samples
                .iter()
                .enumerate()
                .map(|(i, &y)| (i as f64 / sample_rate, y))
                .collect(),
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn axis_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1000.0 || v.abs() < 0.01 {
        format!("{v:.3e}")
    } else {
        format!("{v:.3}")
    }
}

/// Render a line plot to `path`.
pub fn line_plot(path: &Path, title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<()> {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() || xmax <= xmin {
        xmin = 0.0;
        xmax = 1.0;
    }
    if !ymin.is_finite() || ymax <= ymin {
        ymin -= 0.5;
        ymax = ymin + 1.0;
    }
    let pad = 0.05 * (ymax - ymin);
    let (ymin, ymax) = (ymin - pad, ymax + pad);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = move |y: f64| MARGIN_T + (ymax - y) / (ymax - ymin) * plot_h;

    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )?;
    writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;
    writeln!(
        w,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        title
    )?;
    // Frame.
    writeln!(
        w,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        fmt(MARGIN_L),
        fmt(MARGIN_T),
        fmt(plot_w),
        fmt(plot_h)
    )?;
    // Axis range labels.
    for (x, anchor, v) in [
        (MARGIN_L, "start", xmin),
        (WIDTH - MARGIN_R, "end", xmax),
    ] {
        writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            fmt(x),
            fmt(HEIGHT - 22.0),
            axis_label(v)
        )?;
    }
    for (y, v) in [(MARGIN_T + 10.0, ymax), (HEIGHT - MARGIN_B, ymin)] {
        writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            fmt(MARGIN_L - 6.0),
            fmt(y),
            axis_label(v)
        )?;
    }
    writeln!(
        w,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        fmt(MARGIN_L + plot_w / 2.0),
        fmt(HEIGHT - 8.0),
        x_label
    )?;
    writeln!(
        w,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        fmt(MARGIN_T + plot_h / 2.0),
        fmt(MARGIN_T + plot_h / 2.0),
        y_label
    )?;

    for (si, s) in series.iter().enumerate() {
        let color = COLORS[si % COLORS.len()];
        let stride = (s.points.len() / MAX_POINTS).max(1);
        let mut d = String::new();
        for (pi, &(x, y)) in s.points.iter().step_by(stride).enumerate() {
            let cmd = if pi == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{} {} ", fmt(sx(x)), fmt(sy(y))));
        }
        writeln!(
            w,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1"/>"#,
            d.trim_end()
        )?;
        // Legend entry.
        let ly = MARGIN_T + 16.0 + 16.0 * si as f64;
        writeln!(
            w,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#,
            fmt(MARGIN_L + 8.0),
            fmt(ly - 4.0),
            fmt(MARGIN_L + 28.0),
            fmt(ly - 4.0)
        )?;
        writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            fmt(MARGIN_L + 34.0),
            fmt(ly),
            s.label
        )?;
    }
    writeln!(w, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_valid_svg() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.svg");
        let series = [Series {
            label: "demo",
            points: (0..100).map(|i| (i as f64, (i as f64 * 0.1).sin())).collect(),
        }];
        line_plot(&path, "demo plot", "t", "y", &series).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("</svg>"));
        assert!(text.contains("demo plot"));
    }

    #[test]
    fn deterministic_output() {
        let dir = tempfile::tempdir().unwrap();
        let mk = |name: &str| {
            let path = dir.path().join(name);
            let series = [Series {
                label: "s",
                points: (0..50).map(|i| (i as f64, i as f64 * 0.25)).collect(),
            }];
            line_plot(&path, "t", "x", "y", &series).unwrap();
            std::fs::read(&path).unwrap()
        };
        assert_eq!(mk("a.svg"), mk("b.svg"));
    }
}
