//! Self-contained SVG plots: line overlays and a radar chart.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 40.0, 50.0); // left, right, top, bottom

pub const PALETTE: [&str; 4] = ["#222222", "#1f77b4", "#d62728", "#2ca02c"];

pub struct Line<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub color: &'a str,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A "nice" tick step covering `span` with about five ticks.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    mag * if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.03 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Line plot of several series sharing axes. Each series is thinned to at
/// most `max_points` vertices.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, lines: &[Line], max_points: usize) -> String {
    let (l, r, t, b) = MARGIN;
    let (pw, ph) = (W - l - r, H - t - b);
    let (x0, x1) = range(lines.iter().flat_map(|s| s.x.iter().copied()));
    let (y0, y1) = range(lines.iter().flat_map(|s| s.y.iter().copied()));
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| t + ph - (y - y0) / (y1 - y0) * ph;
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = write!(s, r##"<rect x="{l}" y="{t}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>"##);
    for (lo, hi, vertical) in [(x0, x1, true), (y0, y1, false)] {
        let step = tick_step(hi - lo);
        let mut v = (lo / step).ceil() * step;
        while v <= hi {
            let label = format!("{}", (v / step).round() * step);
            if vertical {
                let x = sx(v);
                let _ = write!(s, r##"<line x1="{x:.1}" y1="{t}" x2="{x:.1}" y2="{}" stroke="#eee"/>"##, t + ph);
                let _ = write!(s, r#"<text x="{x:.1}" y="{}" text-anchor="middle">{label}</text>"#, t + ph + 16.0);
            } else {
                let y = sy(v);
                let _ = write!(s, r##"<line x1="{l}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#eee"/>"##, l + pw);
                let _ = write!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{label}</text>"#, l - 6.0, y + 4.0);
            }
            v += step;
        }
    }
    let _ = write!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, l + pw / 2.0, H - 10.0, escape(x_label));
    let _ = write!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        t + ph / 2.0,
        t + ph / 2.0,
        escape(y_label)
    );
    for (k, line) in lines.iter().enumerate() {
        let n = line.x.len().min(line.y.len());
        let stride = n.div_ceil(max_points.max(2)).max(1);
        let mut pts = String::new();
        for i in (0..n).step_by(stride).chain((n > 0 && (n - 1) % stride != 0).then_some(n - 1)) {
            let _ = write!(pts, "{:.1},{:.1} ", sx(line.x[i]), sy(line.y[i]));
        }
        let _ = write!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
            line.color,
            pts.trim_end()
        );
        let ly = t + 14.0 + 16.0 * k as f64;
        let _ = write!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            l + pw - 150.0,
            l + pw - 130.0,
            line.color,
            l + pw - 124.0,
            ly + 4.0,
            escape(line.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Radar chart. `values[series][axis]` are scores in `[0, 1]`, drawn from
/// the centre outward.
pub fn radar(title: &str, axes: &[&str], series: &[(&str, Vec<f64>, &str)]) -> String {
    let (cx, cy, rad) = (W / 2.0, H / 2.0 + 10.0, 140.0);
    let n = axes.len();
    let pt = |k: usize, r: f64| {
        let a = -std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        (cx + r * a.cos(), cy + r * a.sin())
    };
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    for ring in 1..=4 {
        let r = rad * ring as f64 / 4.0;
        let pts: Vec<String> = (0..n).map(|k| pt(k, r)).map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = write!(s, r##"<polygon points="{}" fill="none" stroke="#ddd"/>"##, pts.join(" "));
    }
    for (k, a) in axes.iter().enumerate() {
        let (x, y) = pt(k, rad);
        let _ = write!(s, r##"<line x1="{cx}" y1="{cy}" x2="{x:.1}" y2="{y:.1}" stroke="#bbb"/>"##);
        let (lx, ly) = pt(k, rad + 22.0);
        let _ = write!(s, r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="middle">{}</text>"#, escape(a));
    }
    for (j, (label, values, color)) in series.iter().enumerate() {
        let pts: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(k, v)| pt(k, rad * v.clamp(0.0, 1.0)))
            .map(|(x, y)| format!("{x:.1},{y:.1}"))
            .collect();
        let _ = write!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        let ly = 50.0 + 18.0 * j as f64;
        let _ = write!(
            s,
            r#"<rect x="20" y="{}" width="12" height="12" fill="{color}"/><text x="38" y="{}">{}</text>"#,
            ly - 10.0,
            ly,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}
