//! Minimal deterministic SVG charts.
//!
//! Coordinates are printed with fixed precision so identical inputs give
//! identical bytes. The only varying content is an optional timestamp in
//! the `<metadata>` element.

use std::fmt::Write as _;

use crate::diagnostics::GrowthDiagnostics;
use crate::hindcast::{FitResult, HindcastReport};
use crate::series::{AnnualSeries, YearRange};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dashed,
    Points,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub label: String,
    pub color: &'static str,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub traces: Vec<Trace>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick positions at 1, 2 or 5 times a power of ten.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::EPSILON);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

impl Chart {
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self.traces.iter().flat_map(|t| t.points.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        let pad = ((y1 - y0) * 0.05).max(1e-9);
        (x0, x1, y0 - pad, y1 + pad)
    }

    /// Renders the chart. `timestamp` goes into the metadata element.
    pub fn to_svg(&self, timestamp: Option<&str>) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        if let Some(ts) = timestamp {
            let _ = writeln!(s, "<metadata>generated {}</metadata>", escape(ts));
        }
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            escape(&self.title)
        );

        for t in ticks(x0, x1, 8) {
            let x = sx(t);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
                MARGIN_TOP,
                MARGIN_TOP + ph
            );
            let _ = writeln!(
                s,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                MARGIN_TOP + ph + 18.0,
                tick_label(t)
            );
        }
        for t in ticks(y0, y1, 6) {
            let y = sy(t);
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
                MARGIN_LEFT,
                MARGIN_LEFT + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 6.0,
                y + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            MARGIN_TOP + ph / 2.0,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, trace) in self.traces.iter().enumerate() {
            match trace.style {
                Style::Line | Style::Dashed => {
                    let pts: Vec<String> = trace
                        .points
                        .iter()
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let dash = if trace.style == Style::Dashed {
                        r#" stroke-dasharray="6 4""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
                        trace.color,
                        pts.join(" ")
                    );
                }
                Style::Points => {
                    for &(x, y) in &trace.points {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
                            sx(x),
                            sy(y),
                            trace.color
                        );
                    }
                }
            }
            let ly = MARGIN_TOP + 10.0 + 20.0 * i as f64;
            let lx = MARGIN_LEFT + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/>"#,
                lx + 20.0,
                trace.color
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(&trace.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn percent_points(series: &AnnualSeries, window: Option<YearRange>) -> Vec<(f64, f64)> {
    series
        .iter()
        .filter(|(y, _)| window.is_none_or(|w| w.years().contains(y)))
        .map(|(y, v)| (y as f64, v * 100.0))
        .collect()
}

/// Rates of return, innovation and GWP growth against time.
pub fn rates_chart(diag: &GrowthDiagnostics, smoothed: bool) -> Chart {
    let (eta, innovation, gwp) = diag.rates(smoothed);
    let mut traces = vec![
        Trace {
            label: "rate of return".into(),
            color: "#1f77b4",
            style: Style::Line,
            points: percent_points(eta, None),
        },
        Trace {
            label: "innovation".into(),
            color: "#2ca02c",
            style: Style::Line,
            points: percent_points(innovation, None),
        },
        Trace {
            label: "GWP growth".into(),
            color: "#d62728",
            style: Style::Line,
            points: percent_points(gwp, None),
        },
    ];
    let from_energy = if smoothed {
        diag.smoothed.eta_from_energy.as_ref()
    } else {
        diag.eta_from_energy.as_ref()
    };
    if let Some(e) = from_energy {
        traces.push(Trace {
            label: "energy growth".into(),
            color: "#1f77b4",
            style: Style::Dashed,
            points: percent_points(e, None),
        });
    }
    Chart {
        title: "Growth diagnostics".into(),
        x_label: "year".into(),
        y_label: "% per year".into(),
        traces,
    }
}

/// Innovation against rate of return, with the fitted line.
pub fn fit_chart(diag: &GrowthDiagnostics, window: YearRange, smoothed: bool, fit: &FitResult) -> Chart {
    let (eta, innovation, _) = diag.rates(smoothed);
    let points: Vec<(f64, f64)> = innovation
        .iter()
        .filter(|(y, _)| window.years().contains(y))
        .filter_map(|(y, i)| eta.get(y).map(|e| (e * 100.0, i * 100.0)))
        .collect();
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let line = |x: f64| (fit.slope * x / 100.0 + fit.intercept) * 100.0;
    Chart {
        title: format!("Innovation against rate of return, {window}"),
        x_label: "rate of return (% per year)".into(),
        y_label: "innovation (% per year)".into(),
        traces: vec![
            Trace {
                label: "observed".into(),
                color: "#555555",
                style: Style::Points,
                points,
            },
            Trace {
                label: format!("slope {:.2}", fit.slope),
                color: "#d62728",
                style: Style::Line,
                points: vec![(lo, line(lo)), (hi, line(hi))],
            },
        ],
    }
}

/// Hindcast curves over the smoothed observations.
pub fn hindcast_chart(diag: &GrowthDiagnostics, report: &HindcastReport) -> Chart {
    let traj = &report.trajectory;
    let pick = |v: &[f64]| -> Vec<(f64, f64)> {
        traj.years.iter().zip(v).map(|(&t, &x)| (t, x * 100.0)).collect()
    };
    let window = YearRange {
        start: report.config.train.start,
        end: report.config.eval.end,
    };
    Chart {
        title: format!("Hindcast from {}", report.config.init_year),
        x_label: "year".into(),
        y_label: "% per year".into(),
        traces: vec![
            Trace {
                label: "rate of return".into(),
                color: "#1f77b4",
                style: Style::Points,
                points: percent_points(&diag.smoothed.eta, Some(window)),
            },
            Trace {
                label: "innovation".into(),
                color: "#2ca02c",
                style: Style::Points,
                points: percent_points(&diag.smoothed.innovation, Some(window)),
            },
            Trace {
                label: "GWP growth".into(),
                color: "#d62728",
                style: Style::Points,
                points: percent_points(&diag.smoothed.gwp_growth, Some(window)),
            },
            Trace {
                label: "model rate of return".into(),
                color: "#1f77b4",
                style: Style::Line,
                points: pick(&traj.eta),
            },
            Trace {
                label: "model innovation".into(),
                color: "#2ca02c",
                style: Style::Line,
                points: pick(&traj.innovation),
            },
            Trace {
                label: "model GWP growth".into(),
                color: "#d62728",
                style: Style::Line,
                points: pick(&traj.gwp_growth),
            },
        ],
    }
}
