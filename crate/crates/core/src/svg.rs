//! Minimal SVG emission for band figures: the estimate as a polyline over
//! a shaded band polygon, with simple axes and an optional zero-mass
//! annotation. No plotting dependency; the output is a complete SVG
//! document.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 48.0;

struct Scale {
    min: f64,
    max: f64,
    lo_px: f64,
    hi_px: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let t = (v - self.min) / (self.max - self.min);
        self.lo_px + t * (self.hi_px - self.lo_px)
    }
}

fn nice_ticks(min: f64, max: f64, target: usize) -> Vec<f64> {
    let span = (max - min).max(f64::MIN_POSITIVE);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64 * 1.2)
        .unwrap_or(mag * 10.0);
    let first = (min / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= max + step * 1e-9 {
        ticks.push(t);
        t += step;
    }
    ticks
}

/// Render an estimate curve with its shaded uniform band.
pub fn band_figure(
    grid: &[f64],
    estimate: &[f64],
    lower: &[f64],
    upper: &[f64],
    zero_share: Option<f64>,
    title: &str,
) -> String {
    assert_eq!(grid.len(), estimate.len());
    assert_eq!(grid.len(), lower.len());
    assert_eq!(grid.len(), upper.len());
    let (xmin, xmax) = grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let (mut ymin, mut ymax) = lower
        .iter()
        .chain(upper.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    ymin = ymin.min(0.0);
    if ymax <= ymin {
        ymax = ymin + 1.0;
    }
    let pad = 0.05 * (ymax - ymin);
    let x = Scale {
        min: xmin,
        max: xmax,
        lo_px: MARGIN_L,
        hi_px: WIDTH - MARGIN_R,
    };
    let y = Scale {
        min: ymin - pad,
        max: ymax + pad,
        lo_px: HEIGHT - MARGIN_B,
        hi_px: MARGIN_T,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // band polygon: upper edge left-to-right, lower edge back
    let mut pts = String::new();
    for (g, u) in grid.iter().zip(upper) {
        let _ = write!(pts, "{:.2},{:.2} ", x.map(*g), y.map(*u));
    }
    for (g, l) in grid.iter().zip(lower).rev() {
        let _ = write!(pts, "{:.2},{:.2} ", x.map(*g), y.map(*l));
    }
    let _ = writeln!(
        svg,
        r##"<polygon points="{}" fill="#c8c8c8" fill-opacity="0.75" stroke="none"/>"##,
        pts.trim_end()
    );

    // estimate polyline
    let mut line = String::new();
    for (g, e) in grid.iter().zip(estimate) {
        let _ = write!(line, "{:.2},{:.2} ", x.map(*g), y.map(*e));
    }
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.6"/>"#,
        line.trim_end()
    );

    // axes
    let axis_y = y.map(y.min.max(0.0).min(y.max));
    let _ = writeln!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
        x.lo_px, axis_y, x.hi_px, axis_y
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
        x.lo_px, y.lo_px, x.lo_px, y.hi_px
    );
    for t in nice_ticks(x.min, x.max, 8) {
        let px = x.map(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            y.lo_px,
            y.lo_px + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" font-size="12" text-anchor="middle" font-family="sans-serif">{t:.3}</text>"#,
            y.lo_px + 20.0
        );
    }
    for t in nice_ticks(y.min, y.max, 6) {
        let py = y.map(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="black"/>"#,
            x.lo_px - 5.0,
            x.lo_px
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end" font-family="sans-serif">{t:.3}</text>"#,
            x.lo_px - 8.0,
            py + 4.0
        );
    }

    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="18" font-size="14" text-anchor="middle" font-family="sans-serif">{}</text>"#,
        0.5 * (MARGIN_L + WIDTH - MARGIN_R),
        escape(title)
    );
    if let Some(z) = zero_share {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="start" font-family="sans-serif">zero-mass share: {:.3}</text>"#,
            MARGIN_L + 8.0,
            MARGIN_T + 14.0,
            z
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
