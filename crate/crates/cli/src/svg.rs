//! Minimal standalone SVG charts.
//!
//! Output is plain SVG 1.1 text with fixed number formatting, so identical
//! input always yields byte-identical documents.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChartError {
    #[error("chart {0:?} has no series")]
    NoSeries(String),
    #[error("chart {title:?}: series {series:?} is empty")]
    EmptySeries { title: String, series: String },
    #[error("chart {title:?}: series {series:?} has {len} points, expected {expected}")]
    LengthMismatch {
        title: String,
        series: String,
        len: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChartKind {
    #[default]
    Line,
    /// One bar per x value per series.
    Bar,
}

/// Series plotted against a shared x axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub kind: ChartKind,
    pub x: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
}

/// Parametric curves, each with its own `(x, y)` points, such as trajectories
/// in the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Finite range of the values, padded by one unit on each side when it collapses.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (-1.0, 1.0)
    } else if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()) {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

struct Frame {
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        LEFT + (x - lo) / (hi - lo) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        HEIGHT - BOTTOM - (y - lo) / (hi - lo) * (HEIGHT - TOP - BOTTOM)
    }
}

fn open_document(out: &mut String, title: &str, x_label: &str, y_label: &str, frame: &Frame) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );

    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"#
    );

    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="11">"#);
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let xv = frame.x_range.0 + f * (frame.x_range.1 - frame.x_range.0);
        let yv = frame.y_range.0 + f * (frame.y_range.1 - frame.y_range.0);
        let (xp, yp) = (frame.px(xv), frame.py(yv));
        let _ = writeln!(
            out,
            r#"<line x1="{xp:.2}" y1="{y0:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/><text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{yp:.2}" x2="{x0:.2}" y2="{yp:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            yp + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, names: &[&str]) {
    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="11">"#);
    for (k, name) in names.iter().enumerate() {
        let y = TOP + 10.0 + 16.0 * k as f64;
        let x = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="12" height="4" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            y - 4.0,
            PALETTE[k % PALETTE.len()],
            x + 18.0,
            y + 1.0,
            escape(name)
        );
    }
    let _ = writeln!(out, "</g>");
}

fn polyline(out: &mut String, frame: &Frame, points: impl Iterator<Item = (f64, f64)>, colour: &str) {
    let coords: Vec<String> = points
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{}"/>"#,
        coords.join(" ")
    );
}

/// Renders a chart with one polyline (or one group of bars) per series.
pub fn render_svg(spec: &ChartSpec) -> Result<String, ChartError> {
    if spec.series.is_empty() {
        return Err(ChartError::NoSeries(spec.title.clone()));
    }
    let n = spec.x.len();
    for (name, values) in &spec.series {
        if values.is_empty() {
            return Err(ChartError::EmptySeries {
                title: spec.title.clone(),
                series: name.clone(),
            });
        }
        if values.len() != n {
            return Err(ChartError::LengthMismatch {
                title: spec.title.clone(),
                series: name.clone(),
                len: values.len(),
                expected: n,
            });
        }
    }

    let ys = spec.series.iter().flat_map(|(_, v)| v.iter().copied());
    let frame = match spec.kind {
        ChartKind::Line => Frame {
            x_range: range(spec.x.iter().copied()),
            y_range: range(ys),
        },
        ChartKind::Bar => {
            let (lo, hi) = range(spec.x.iter().copied());
            let (ylo, yhi) = range(ys.chain(std::iter::once(0.0)));
            Frame {
                x_range: (lo - 0.5, hi + 0.5),
                y_range: (ylo, yhi),
            }
        }
    };

    let mut out = String::new();
    open_document(&mut out, &spec.title, &spec.x_label, &spec.y_label, &frame);
    match spec.kind {
        ChartKind::Line => {
            for (k, (_, values)) in spec.series.iter().enumerate() {
                let colour = PALETTE[k % PALETTE.len()];
                polyline(
                    &mut out,
                    &frame,
                    spec.x.iter().copied().zip(values.iter().copied()),
                    colour,
                );
            }
        }
        ChartKind::Bar => {
            let groups = spec.series.len() as f64;
            let unit = frame.px(1.0) - frame.px(0.0);
            let width = 0.8 * unit / groups;
            let base = frame.py(0.0);
            for (k, (_, values)) in spec.series.iter().enumerate() {
                let colour = PALETTE[k % PALETTE.len()];
                for (x, y) in spec.x.iter().zip(values) {
                    if !y.is_finite() {
                        continue;
                    }
                    let left = frame.px(*x) - 0.4 * unit + width * k as f64;
                    let top = frame.py(*y).min(base);
                    let height = (frame.py(*y) - base).abs();
                    let _ = writeln!(
                        out,
                        r#"<rect x="{left:.2}" y="{top:.2}" width="{width:.2}" height="{height:.2}" fill="{colour}"/>"#
                    );
                }
            }
        }
    }
    let names: Vec<&str> = spec.series.iter().map(|(n, _)| n.as_str()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders one polyline per parametric curve.
pub fn render_trajectories(spec: &TrajectorySpec) -> Result<String, ChartError> {
    if spec.series.is_empty() {
        return Err(ChartError::NoSeries(spec.title.clone()));
    }
    if let Some((name, _)) = spec.series.iter().find(|(_, p)| p.is_empty()) {
        return Err(ChartError::EmptySeries {
            title: spec.title.clone(),
            series: name.clone(),
        });
    }
    let points = || spec.series.iter().flat_map(|(_, p)| p.iter().copied());
    let frame = Frame {
        x_range: range(points().map(|p| p.0)),
        y_range: range(points().map(|p| p.1)),
    };
    let mut out = String::new();
    open_document(&mut out, &spec.title, &spec.x_label, &spec.y_label, &frame);
    for (k, (_, p)) in spec.series.iter().enumerate() {
        polyline(&mut out, &frame, p.iter().copied(), PALETTE[k % PALETTE.len()]);
    }
    let names: Vec<&str> = spec.series.iter().map(|(n, _)| n.as_str()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    Ok(out)
}
