//! Minimal SVG charts: scatter, line and bar plots with linear axes.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a (f64, f64)>, extra: &'a [(f64, f64)]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in points.chain(extra) {
            if x.is_finite() && y.is_finite() {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
            (lo - 0.05 * span, hi + 0.05 * span)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (W - RIGHT + LEFT) / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str, x_ticks: bool) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let fx = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
        let fy = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let (x, y) = (f.px(fx), f.py(fy));
        if x_ticks {
            let _ = writeln!(
                s,
                r#"<line x1="{x:.1}" y1="{b}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
                b + 4.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                b + 17.0,
                tick(fx)
            );
        }
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{l}" y2="{y:.1}" stroke="black"/>"#,
            l - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            l - 7.0,
            y + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        H - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e5).contains(&a) {
        format!("{v:.1e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn legend(s: &mut String, labels: &[&str]) {
    for (k, label) in labels.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * k as f64;
        let x = W - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{:.1}" width="10" height="10" fill="{}"/>"#,
            y - 9.0,
            PALETTE[k % PALETTE.len()]
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y:.1}">{}</text>"#,
            x + 15.0,
            escape(label)
        );
    }
}

/// Scatter plot; `highlight` draws a dashed box given by lower and upper
/// corners.
pub fn scatter(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[Series],
    highlight: Option<((f64, f64), (f64, f64))>,
) -> String {
    let corners: Vec<(f64, f64)> = highlight.map(|(a, b)| vec![a, b]).unwrap_or_default();
    let f = Frame::fit(series.iter().flat_map(|s| s.points.iter()), &corners);
    let mut s = open(title);
    axes(&mut s, &f, xlabel, ylabel, true);
    if let Some((lo, hi)) = highlight {
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black" stroke-dasharray="4 3"/>"#,
            f.px(lo.0),
            f.py(hi.1),
            f.px(hi.0) - f.px(lo.0),
            f.py(lo.1) - f.py(hi.1)
        );
    }
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for &(x, y) in ser
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
        {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{color}" fill-opacity="0.7"/>"#,
                f.px(x),
                f.py(y)
            );
        }
    }
    legend(
        &mut s,
        &series.iter().map(|x| x.label.as_str()).collect::<Vec<_>>(),
    );
    s.push_str("</svg>\n");
    s
}

/// Line plot; points within a series are joined in the given order.
pub fn lines(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let f = Frame::fit(series.iter().flat_map(|s| s.points.iter()), &[]);
    let mut s = open(title);
    axes(&mut s, &f, xlabel, ylabel, true);
    for (k, ser) in series.iter().enumerate() {
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.1},{:.1}", f.px(x), f.py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            pts.join(" "),
            PALETTE[k % PALETTE.len()]
        );
    }
    legend(
        &mut s,
        &series.iter().map(|x| x.label.as_str()).collect::<Vec<_>>(),
    );
    s.push_str("</svg>\n");
    s
}

/// Vertical bar chart with one bar per label.
pub fn bars(title: &str, ylabel: &str, labels: &[String], values: &[f64]) -> String {
    let hi = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let lo = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::min);
    let f = Frame {
        x0: 0.0,
        x1: labels.len().max(1) as f64,
        y0: lo,
        y1: if hi > lo { hi * 1.05 } else { lo + 1.0 },
    };
    let mut s = open(title);
    axes(&mut s, &f, "", ylabel, false);
    for (k, (label, &v)) in labels.iter().zip(values).enumerate() {
        let x = f.px(k as f64 + 0.15);
        let w = f.px(k as f64 + 0.85) - x;
        let (top, bottom) = (f.py(v.max(0.0)), f.py(v.min(0.0)));
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{top:.1}" width="{w:.1}" height="{:.1}" fill="{}"/>"#,
            bottom - top,
            PALETTE[k % PALETTE.len()]
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx:.1}" y="{ly:.1}" text-anchor="end" font-size="10" transform="rotate(-30 {cx:.1} {ly:.1})">{}</text>"#,
            escape(label),
            cx = x + w / 2.0,
            ly = H - BOTTOM + 14.0
        );
    }
    s.push_str("</svg>\n");
    s
}
