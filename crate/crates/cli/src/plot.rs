//! Static SVG chart of squared error (log scale) against primal updates.
//!
//! The chart depends only on the CSV text it is given: either a trace
//! (`k,primal_updates,squared_error,...`) or a comparison summary
//! (`algorithm,primal_updates,median_squared_error`).

use std::fmt::Write;

use anyhow::{bail, Context, Result};
use randprox::harness::{read_trace, TRACE_HEADER};

pub const SUMMARY_HEADER: &str = "algorithm,primal_updates,median_squared_error";

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

pub fn render(csv: &str) -> Result<String> {
    let header = csv
        .lines()
        .next()
        .unwrap_or_default()
        .trim_end_matches('\r');
    let series = if header == TRACE_HEADER.join(",") {
        trace_series(csv)?
    } else if header == SUMMARY_HEADER {
        summary_series(csv)?
    } else {
        bail!("unrecognized CSV header `{header}`");
    };
    if series.iter().all(|s| s.points.is_empty()) {
        bail!("no rows to plot");
    }
    Ok(draw(&series))
}

fn trace_series(csv: &str) -> Result<Vec<Series>> {
    let rows = read_trace(csv.as_bytes())?;
    let mut series: Vec<Series> = Vec::new();
    for r in rows {
        let label = format!("{} (seed {})", r.algorithm, r.seed);
        let point = (r.primal_updates as f64, r.squared_error);
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                label,
                points: vec![point],
            }),
        }
    }
    Ok(series)
}

fn summary_series(csv: &str) -> Result<Vec<Series>> {
    let mut series: Vec<Series> = Vec::new();
    for (i, line) in csv.lines().enumerate().skip(1) {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [label, x, y] = fields[..] else {
            bail!("summary line {}: expected 3 fields", i + 1);
        };
        let x: f64 = x
            .parse()
            .with_context(|| format!("summary line {}", i + 1))?;
        let y: f64 = y
            .parse()
            .with_context(|| format!("summary line {}", i + 1))?;
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((x, y)),
            None => series.push(Series {
                label: label.to_owned(),
                points: vec![(x, y)],
            }),
        }
    }
    Ok(series)
}

fn draw(series: &[Series]) -> String {
    let points = series.iter().flat_map(|s| &s.points);
    let x_max = points.clone().map(|p| p.0).fold(0.0, f64::max).max(1.0);
    let positive = points.filter(|p| p.1 > 0.0 && p.1.is_finite()).map(|p| p.1);
    let (lo, hi) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
        (lo.min(y), hi.max(y))
    });
    let (d_lo, d_hi) = if lo.is_finite() {
        let d_lo = lo.log10().floor() as i32;
        (d_lo, (hi.log10().ceil() as i32).max(d_lo + 1))
    } else {
        (-16, 0)
    };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x / x_max * plot_w;
    let sy = |y: f64| {
        // Zero and underflowing values sit on the bottom edge.
        let e = if y > 0.0 {
            y.log10().clamp(d_lo as f64, d_hi as f64)
        } else {
            d_lo as f64
        };
        TOP + (d_hi as f64 - e) / (d_hi - d_lo) as f64 * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let step = ((d_hi - d_lo) as f64 / 8.0).ceil().max(1.0) as i32;
    for d in (d_lo..=d_hi).filter(|d| (d - d_lo) % step == 0) {
        let y = sy(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for i in 0..=5 {
        let value = x_max * i as f64 / 5.0;
        let x = sx(value);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 16.0,
            value.round()
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">primal updates</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">squared error</text>"#,
        TOP + plot_h / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
