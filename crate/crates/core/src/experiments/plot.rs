//! Minimal SVG line plot with a logarithmic y axis.

use std::fmt::Write;

use super::table::{CellKind, SweepRow};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

/// One plotted trace: series label, cell kind, `(x, log10 y)` points.
type Trace = (String, CellKind, Vec<(f64, f64)>);

const COLORS: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders every `(series, kind)` pair as its own trace: theory as solid
/// lines, references dashed, simulations as markers. Non-positive values are
/// skipped since they cannot sit on a log axis.
pub fn to_svg(rows: &[SweepRow], title: &str, x_label: &str) -> String {
    let mut traces: Vec<Trace> = Vec::new();
    for row in rows {
        for c in &row.cells {
            if !(c.value > 0.0 && c.value.is_finite()) {
                continue;
            }
            let pt = (row.axis, c.value.log10());
            match traces.iter_mut().find(|t| t.0 == c.series && t.1 == c.kind) {
                Some(t) => t.2.push(pt),
                None => traces.push((c.series.clone(), c.kind, vec![pt])),
            }
        }
    }

    let pts = traces.iter().flat_map(|t| t.2.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, -1.0, 0.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );

    // decade grid
    let mut d = y0;
    while d <= y1 + 1e-9 {
        let y = sy(d);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0,
            d as i64
        );
        d += 1.0;
    }
    for k in 0..=5 {
        let xv = x0 + (x1 - x0) * k as f64 / 5.0;
        let x = sx(xv);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{:.1}" stroke="#eee"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 16.0,
            (xv * 100.0).round() / 100.0
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">error probability</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    // series colours are keyed by label so theory and sim of one curve match
    let mut labels: Vec<&str> = Vec::new();
    for (i, (series, kind, pts)) in traces.iter().enumerate() {
        let ci = match labels.iter().position(|l| l == series) {
            Some(k) => k,
            None => {
                labels.push(series);
                labels.len() - 1
            }
        };
        let color = COLORS[ci % COLORS.len()];
        match kind {
            CellKind::Sim => {
                for &(x, y) in pts {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="none" stroke="{color}"/>"#,
                        sx(x),
                        sy(y)
                    );
                }
            }
            _ => {
                let path: Vec<String> = pts
                    .iter()
                    .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
                    .collect();
                let dash = if *kind == CellKind::Reference {
                    r#" stroke-dasharray="5,4""#
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                    path.join(" ")
                );
            }
        }
        let ly = TOP + 10.0 + 16.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{} ({})</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(series),
            kind
        );
    }
    out.push_str("</svg>\n");
    out
}
