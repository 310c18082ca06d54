//! Minimal SVG plots: line charts with ±sd bands, scatter plots and bar charts.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One line: (x, mean, sd) triples.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| {
            if !a.is_finite() || !b.is_finite() {
                (0.0, 1.0)
            } else if a == b {
                (a - 0.5, b + 0.5)
            } else {
                (a, b)
            }
        };
        let (x0, x1) = widen(x);
        let (y0, y1) = widen(y);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn ticks(a: f64, b: f64) -> Vec<f64> {
    let span = b - a;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let mut t = (a / step).ceil() * step;
    let mut out = Vec::new();
    while t <= b + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn tick_label(v: f64) -> String {
    if v == v.round() && v.abs() < 1e6 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn open(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (W - RIGHT + LEFT) / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str, xticks: &[(f64, String)]) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = write!(out, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#);
    for (x, label) in xticks {
        let px = f.px(*x);
        let _ = write!(out, r#"<line x1="{px:.1}" y1="{b}" x2="{px:.1}" y2="{}" stroke="black"/>"#, b + 5.0);
        let _ = write!(out, r#"<text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"#, b + 18.0, escape(label));
    }
    for y in ticks(f.y0, f.y1) {
        let py = f.py(y);
        let _ = write!(out, r#"<line x1="{}" y1="{py:.1}" x2="{l}" y2="{py:.1}" stroke="black"/>"#, l - 5.0);
        let _ = write!(
            out,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            l - 8.0,
            py + 4.0,
            tick_label(y)
        );
    }
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        H - 15.0,
        escape(xlabel)
    );
    let _ = write!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn legend(out: &mut String, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        let x = W - RIGHT + 15.0;
        let c = PALETTE[i % PALETTE.len()];
        let _ = write!(out, r#"<rect x="{x}" y="{}" width="12" height="12" fill="{c}"/>"#, y - 10.0);
        let _ = write!(out, r#"<text x="{}" y="{y}">{}</text>"#, x + 18.0, escape(name));
    }
}

/// Lines of means with shaded ±sd bands. With `log2_x` the x axis is spaced
/// by log₂ and ticks carry the raw x values.
pub fn line_band_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log2_x: bool) -> String {
    let tx = |x: f64| if log2_x { x.log2() } else { x };
    let all: Vec<&(f64, f64, f64)> = series.iter().flat_map(|s| &s.points).collect();
    let fold = |init: f64, op: fn(f64, f64) -> f64, key: &dyn Fn(&(f64, f64, f64)) -> f64| {
        all.iter().map(|p| key(p)).fold(init, op)
    };
    let x = (fold(f64::INFINITY, f64::min, &|p| tx(p.0)), fold(f64::NEG_INFINITY, f64::max, &|p| tx(p.0)));
    let y = (fold(f64::INFINITY, f64::min, &|p| p.1 - p.2), fold(f64::NEG_INFINITY, f64::max, &|p| p.1 + p.2));
    let f = Frame::new(x, y);
    let mut xs: Vec<f64> = all.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let xticks: Vec<(f64, String)> = xs.iter().map(|&v| (tx(v), tick_label(v))).collect();

    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &f, xlabel, ylabel, &xticks);
    for (i, s) in series.iter().enumerate() {
        let c = PALETTE[i % PALETTE.len()];
        if s.points.is_empty() {
            continue;
        }
        let upper: Vec<String> = s.points.iter().map(|p| format!("{:.2},{:.2}", f.px(tx(p.0)), f.py(p.1 + p.2))).collect();
        let lower: Vec<String> = s.points.iter().rev().map(|p| format!("{:.2},{:.2}", f.px(tx(p.0)), f.py(p.1 - p.2))).collect();
        let _ = write!(
            out,
            r#"<polygon points="{} {}" fill="{c}" fill-opacity="0.2" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let line: Vec<String> = s.points.iter().map(|p| format!("{:.2},{:.2}", f.px(tx(p.0)), f.py(p.1))).collect();
        let _ = write!(out, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, line.join(" "));
        for p in &s.points {
            let _ = write!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, f.px(tx(p.0)), f.py(p.1));
        }
    }
    let names: Vec<&str> = series.iter().map(|s| s.name.as_str()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}

/// Scatter of (x, y); points listed in `highlight` are drawn in a second colour.
pub fn scatter_plot(title: &str, xlabel: &str, ylabel: &str, points: &[(f64, f64)], highlight: &[usize]) -> String {
    let x = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let y = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    let f = Frame::new(x, y);
    let xticks: Vec<(f64, String)> = ticks(f.x0, f.x1).into_iter().map(|v| (v, tick_label(v))).collect();
    let mut marked = vec![false; points.len()];
    highlight.iter().filter(|&&i| i < points.len()).for_each(|&i| marked[i] = true);
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &f, xlabel, ylabel, &xticks);
    for (i, p) in points.iter().enumerate() {
        let (c, r) = if marked[i] { (PALETTE[3], 3.5) } else { (PALETTE[0], 1.5) };
        let _ = write!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{c}"/>"#, f.px(p.0), f.py(p.1));
    }
    out.push_str("</svg>\n");
    out
}

/// Vertical bars at positions 1..=len.
pub fn bar_plot(title: &str, xlabel: &str, ylabel: &str, values: &[f64]) -> String {
    let top = values.iter().copied().fold(0.0, f64::max);
    let f = Frame::new((0.5, values.len() as f64 + 0.5), (0.0, if top > 0.0 { top } else { 1.0 }));
    let step = (values.len() / 10).max(1);
    let xticks: Vec<(f64, String)> =
        (1..=values.len()).filter(|i| (i - 1) % step == 0).map(|i| (i as f64, i.to_string())).collect();
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &f, xlabel, ylabel, &xticks);
    let width = (f.px(1.0) - f.px(0.0)) * 0.8;
    for (i, &v) in values.iter().enumerate() {
        let x = f.px(i as f64 + 1.0) - width / 2.0;
        let y = f.py(v.max(0.0));
        let _ = write!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{width:.2}" height="{:.2}" fill="{}"/>"#,
            f.py(0.0) - y,
            PALETTE[0]
        );
    }
    out.push_str("</svg>\n");
    out
}
