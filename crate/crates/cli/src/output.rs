//! CSV and SVG writers.

use std::fmt::Write as _;

use icbounds::RatePoint;

/// Seventeen significant digits, enough to re-parse the exact `f64`.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with a header row, comma separators and LF line endings.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [RatePoint],
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const TICKS: usize = 5;

/// Line plot of rate-region boundaries with axes in bits.
pub fn svg(series: &[Series]) -> String {
    let max_of = |f: fn(&RatePoint) -> f64| {
        series.iter().flat_map(|s| s.points.iter().map(f)).fold(0.0f64, f64::max).max(1e-9) * 1.05
    };
    let (x_max, y_max) = (max_of(|p| p.r1), max_of(|p| p.r2));
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + x / x_max * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - y / y_max * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        out,
        r#"<path d="M{x0:.2},{:.2} L{x0:.2},{y0:.2} L{:.2},{y0:.2}" stroke="black" fill="none"/>"#,
        sy(y_max),
        sx(x_max)
    );
    for k in 0..=TICKS {
        let fx = x_max * k as f64 / TICKS as f64;
        let fy = y_max * k as f64 / TICKS as f64;
        let (tx, ty) = (sx(fx), sy(fy));
        let _ = writeln!(out, r#"<line x1="{tx:.2}" y1="{y0:.2}" x2="{tx:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{tx:.2}" y="{:.2}" font-size="11" text-anchor="middle">{fx:.2}</text>"#,
            y0 + 18.0
        );
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{ty:.2}" x2="{x0:.2}" y2="{ty:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{fy:.2}</text>"#,
            x0 - 8.0,
            ty + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">R1 (bits/channel use)</text>"#,
        MARGIN + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {:.2})">R2 (bits/channel use)</text>"#,
        MARGIN + plot_h / 2.0,
        MARGIN + plot_h / 2.0
    );
    for (k, s) in series.iter().enumerate() {
        let pts: Vec<String> = s.points.iter().map(|p| format!("{:.3},{:.3}", sx(p.r1), sy(p.r2))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" stroke="{}" stroke-width="2" fill="none"/>"#,
            pts.join(" "),
            s.color
        );
        let ly = MARGIN + 18.0 * k as f64;
        let lx = WIDTH - MARGIN - 120.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/>"#,
            lx + 20.0,
            s.color
        );
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, lx + 26.0, ly + 4.0, s.label);
    }
    out.push_str("</svg>\n");
    out
}
