//! Minimal SVG figures: line plots and a gap heatmap.

use std::fmt::Write;

use crate::output::Metadata;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a (f64, f64)>) -> Self {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = x;
        for &(a, b) in points.filter(|(a, b)| a.is_finite() && b.is_finite()) {
            x = (x.0.min(a), x.1.max(a));
            y = (y.0.min(b), y.1.max(b));
        }
        let widen = |r: (f64, f64)| {
            if !r.0.is_finite() {
                (0.0, 1.0)
            } else if r.1 - r.0 < 1e-12 {
                (r.0 - 0.5, r.1 + 0.5)
            } else {
                r
            }
        };
        Frame { x: widen(x), y: widen(y) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(meta: &Metadata, title: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    s.push_str("<!--\n");
    for (k, v) in meta {
        writeln!(s, "# {k}: {}", v.replace("--", "- -")).unwrap();
    }
    s.push_str("-->\n");
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
    s
}

fn axes(s: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    let text = |s: &mut String, x: f64, y: f64, anchor: &str, t: &str| {
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            escape(t)
        )
        .unwrap();
    };
    text(s, MARGIN, HEIGHT - MARGIN + 14.0, "start", &format!("{:.4}", f.x.0));
    text(s, WIDTH - MARGIN, HEIGHT - MARGIN + 14.0, "end", &format!("{:.4}", f.x.1));
    text(s, MARGIN - 4.0, HEIGHT - MARGIN, "end", &format!("{:.3}", f.y.0));
    text(s, MARGIN - 4.0, MARGIN + 10.0, "end", &format!("{:.3}", f.y.1));
    text(s, WIDTH / 2.0, HEIGHT - 12.0, "middle", x_label);
    text(s, 14.0, HEIGHT / 2.0, "middle", y_label);
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn line_plot(meta: &Metadata, title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let frame = Frame::fit(series.iter().flat_map(|s| s.points.iter()));
    let mut s = header(meta, title);
    axes(&mut s, &frame, x_label, y_label);
    let mut labelled = Vec::new();
    for (i, line) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = line
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let dash = if line.dashed { r#" stroke-dasharray="5,3""# } else { "" };
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2"{dash} points="{}"/>"#,
            pts.join(" ")
        )
        .unwrap();
        if !line.label.is_empty() && !labelled.contains(&line.label) {
            let y = MARGIN + 14.0 + 14.0 * labelled.len() as f64;
            writeln!(
                s,
                r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" fill="{color}" text-anchor="end">{}</text>"#,
                WIDTH - MARGIN - 6.0,
                escape(&line.label)
            )
            .unwrap();
            labelled.push(line.label.clone());
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Grey-scale map of `values[ix][ip]` over the `x_axis` by `p_axis` grid;
/// darker is smaller.
pub fn heatmap(meta: &Metadata, title: &str, x_axis: &[f64], p_axis: &[f64], values: &[Vec<f64>]) -> String {
    let corners = [
        (x_axis[0], p_axis[0]),
        (x_axis[x_axis.len() - 1], p_axis[p_axis.len() - 1]),
    ];
    let frame = Frame::fit(corners.iter());
    let mut s = header(meta, title);
    let (lo, hi) = values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi - lo > 0.0 { hi - lo } else { 1.0 };
    let cell_w = (WIDTH - 2.0 * MARGIN) / x_axis.len() as f64;
    let cell_h = (HEIGHT - 2.0 * MARGIN) / p_axis.len() as f64;
    for (ix, col) in values.iter().enumerate() {
        for (ip, &v) in col.iter().enumerate() {
            let shade = (255.0 * (v - lo) / span).round() as u8;
            writeln!(
                s,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{shade:02x}{shade:02x}{shade:02x}"/>"##,
                MARGIN + ix as f64 * cell_w,
                HEIGHT - MARGIN - (ip + 1) as f64 * cell_h,
                cell_w + 0.05,
                cell_h + 0.05
            )
            .unwrap();
        }
    }
    axes(&mut s, &frame, "x", "p");
    s.push_str("</svg>\n");
    s
}
