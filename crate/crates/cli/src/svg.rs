//! Minimal hand-written SVG line charts.

use std::fmt::Write;

use crate::output::fmt_num;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 300.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 40.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    (x0, x1, 0.0, y1 * 1.05)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Chart {
    /// Chart body as an SVG group translated to `(dx, dy)`.
    fn group(&self, dx: f64, dy: f64) -> String {
        let (x0, x1, y0, y1) = bounds(&self.series);
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut g = String::new();
        let _ = writeln!(g, r#"<g transform="translate({dx},{dy})">"#);
        let _ = writeln!(
            g,
            r#"<text x="{}" y="18" font-size="13" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            g,
            r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>"##
        );
        for i in 0..=4 {
            let f = f64::from(i) / 4.0;
            let yv = y0 + f * (y1 - y0);
            let xv = x0 + f * (x1 - x0);
            let _ = writeln!(
                g,
                r#"<text x="{}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 4.0,
                sy(yv) + 3.0,
                fmt_num((yv * 1000.0).round() / 1000.0)
            );
            let _ = writeln!(
                g,
                r#"<text x="{:.1}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
                sx(xv),
                HEIGHT - MARGIN_BOTTOM + 14.0,
                xv.round()
            );
        }
        let _ = writeln!(
            g,
            r#"<text x="12" y="{}" font-size="11" transform="rotate(-90 12 {})" text-anchor="middle">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                g,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
            let ly = MARGIN_TOP + 14.0 + 14.0 * i as f64;
            let _ = writeln!(
                g,
                r#"<text x="{}" y="{ly}" font-size="10" fill="{color}">{}</text>"#,
                MARGIN_LEFT + 8.0,
                escape(&s.label)
            );
        }
        g.push_str("</g>\n");
        g
    }
}

/// Charts laid out in a grid with `cols` columns.
pub fn render(charts: &[Chart], cols: usize) -> String {
    let cols = cols.max(1);
    let rows = charts.len().div_ceil(cols).max(1);
    let w = WIDTH * cols.min(charts.len().max(1)) as f64;
    let h = HEIGHT * rows as f64;
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#
    );
    out.push('\n');
    for (i, c) in charts.iter().enumerate() {
        out.push_str(&c.group(WIDTH * (i % cols) as f64, HEIGHT * (i / cols) as f64));
    }
    out.push_str("</svg>\n");
    out
}
