//! Dependency-free SVG renderings of scans, circle maps and orbits.

use crate::orbit::{RegimeLabel, ScanResult};
use crate::model::CylinderPoint;
use std::f64::consts::{PI, TAU};
use std::fmt::Write;

/// Fraction of the data range added on each side of a plotted axis.
pub const AXIS_PADDING: f64 = 0.05;

pub fn label_color(label: RegimeLabel) -> &'static str {
    match label {
        RegimeLabel::InvariantCurve => "#4c72b0",
        RegimeLabel::PeriodicSink => "#55a868",
        RegimeLabel::TransientChaos => "#dd8452",
        RegimeLabel::StrangeAttractorCandidate => "#c44e52",
        RegimeLabel::Escaped => "#8c8c8c",
    }
}

const ERROR_COLOR: &str = "#000000";

fn open(w: f64, h: f64, extra: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\"{extra}>\n\
         <rect class=\"background\" x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 || (1e-2..1e3).contains(&v.abs()) {
        format!("{v:.3}")
    } else {
        format!("{v:.1e}")
    }
}

/// Regime grid: `λ` left to right, `K_ω` bottom to top, one rectangle per
/// cell plus a legend. `None` for an empty scan.
pub fn regime_svg(result: &ScanResult) -> Option<String> {
    let (nl, nk) = (result.lambdas.len(), result.k_omegas.len());
    if nl == 0 || nk == 0 {
        return None;
    }
    let (left, top, cell) = (80.0, 20.0, 40.0);
    let legend_h = 22.0 * (RegimeLabel::ALL.len() + 1) as f64;
    let grid_w = cell * nl as f64;
    let grid_h = cell * nk as f64;
    let width = left + grid_w + 240.0;
    let height = (top + grid_h + 50.0).max(top + legend_h + 20.0);
    let mut s = open(width, height, "");
    for ki in 0..nk {
        for li in 0..nl {
            let (color, title) = match result.cell(ki, li) {
                Ok(c) => (label_color(c.label), c.label.as_str().to_string()),
                Err(e) => (ERROR_COLOR, format!("Error: {}", xml_escape(e))),
            };
            let x = left + cell * li as f64;
            let y = top + cell * (nk - 1 - ki) as f64;
            let _ = writeln!(
                s,
                "<rect class=\"cell\" x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{color}\"><title>lambda={} K_omega={} {title}</title></rect>",
                result.lambdas[li], result.k_omegas[ki]
            );
        }
    }
    for (li, l) in result.lambdas.iter().enumerate() {
        let x = left + cell * (li as f64 + 0.5);
        let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{}</text>", top + grid_h + 14.0, fmt_num(*l));
    }
    for (ki, k) in result.k_omegas.iter().enumerate() {
        let y = top + cell * (nk - 1 - ki) as f64 + cell * 0.5 + 3.0;
        let _ = writeln!(s, "<text x=\"{}\" y=\"{y}\" font-size=\"9\" text-anchor=\"end\">{}</text>", left - 6.0, fmt_num(*k));
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">lambda</text>", left + grid_w / 2.0, top + grid_h + 34.0);
    let _ = writeln!(s, "<text x=\"14\" y=\"{}\" font-size=\"11\">K_omega</text>", top + grid_h / 2.0);
    let lx = left + grid_w + 20.0;
    s.push_str("<g class=\"legend\">\n");
    for (i, label) in RegimeLabel::ALL.iter().enumerate() {
        let y = top + 22.0 * i as f64;
        let _ = writeln!(s, "<rect class=\"legend-swatch\" x=\"{lx}\" y=\"{y}\" width=\"14\" height=\"14\" fill=\"{}\"/>", label_color(*label));
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>", lx + 20.0, y + 11.0, label.as_str());
    }
    let y = top + 22.0 * RegimeLabel::ALL.len() as f64;
    let _ = writeln!(s, "<rect class=\"legend-swatch\" x=\"{lx}\" y=\"{y}\" width=\"14\" height=\"14\" fill=\"{ERROR_COLOR}\"/>");
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\">Error</text>", lx + 20.0, y + 11.0);
    s.push_str("</g>\n</svg>\n");
    Some(s)
}

/// One panel of a circle-map plot.
#[derive(Debug, Clone)]
pub struct CirclePanel {
    pub title: String,
    /// `(x, h_a(x))` with both coordinates in `[0, 2π)`.
    pub graph: Vec<(f64, f64)>,
    pub critical: Vec<(f64, f64)>,
}

/// Panels laid out in a row of squares over `[0, 2π]²`, with the diagonal
/// for reference. Curve pieces are split where the graph wraps.
pub fn circle_panels_svg(panels: &[CirclePanel]) -> Option<String> {
    if panels.is_empty() || panels.iter().all(|p| p.graph.is_empty()) {
        return None;
    }
    let (size, margin) = (220.0, 30.0);
    let width = margin + panels.len() as f64 * (size + margin);
    let height = size + 2.0 * margin + 10.0;
    let mut s = open(width, height, "");
    let scale = size / TAU;
    for (i, p) in panels.iter().enumerate() {
        let ox = margin + i as f64 * (size + margin);
        let oy = margin;
        let px = |x: f64| ox + x * scale;
        let py = |y: f64| oy + size - y * scale;
        let _ = writeln!(s, "<g class=\"panel\">");
        let _ = writeln!(s, "<rect class=\"frame\" x=\"{ox}\" y=\"{oy}\" width=\"{size}\" height=\"{size}\" fill=\"none\" stroke=\"black\"/>");
        let _ = writeln!(s, "<line class=\"diagonal\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbbbbb\" stroke-dasharray=\"3,3\"/>", px(0.0), py(0.0), px(TAU), py(TAU));
        for piece in split_on_wrap(&p.graph) {
            let pts: Vec<String> = piece.iter().map(|(x, y)| format!("{:.3},{:.3}", px(*x), py(*y))).collect();
            let _ = writeln!(s, "<polyline class=\"graph\" fill=\"none\" stroke=\"#4c72b0\" points=\"{}\"/>", pts.join(" "));
        }
        for (cx, cy) in &p.critical {
            let _ = writeln!(s, "<circle class=\"critical\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#c44e52\"/>", px(*cx), py(*cy));
        }
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>", ox + size / 2.0, oy - 8.0, xml_escape(&p.title));
        let _ = writeln!(s, "<text x=\"{ox}\" y=\"{}\" font-size=\"9\">0</text>", oy + size + 12.0);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"end\">2pi</text>", ox + size, oy + size + 12.0);
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn split_on_wrap(graph: &[(f64, f64)]) -> Vec<Vec<(f64, f64)>> {
    let mut pieces: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    for &pt in graph {
        if let Some(&(_, prev)) = current.last() {
            if (pt.1 - prev).abs() > PI {
                pieces.push(std::mem::take(&mut current));
            }
        }
        current.push(pt);
    }
    if !current.is_empty() {
        pieces.push(current);
    }
    pieces
}

/// Axis range `[lo, hi]` widened by [`AXIS_PADDING`] of its length (or by
/// a unit when the data are constant).
pub fn padded_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { AXIS_PADDING * (hi - lo) } else { 1.0 };
    Some((lo - pad, hi + pad))
}

/// Scatter of orbit points; `x` spans `[0, 2π]`, `y` the padded data range.
/// The ranges are recorded as `data-*` attributes on the root element.
pub fn orbit_svg(points: &[CylinderPoint]) -> Option<String> {
    let (y_lo, y_hi) = padded_range(points.iter().map(|p| p.y))?;
    let (w, h, m) = (640.0, 400.0, 50.0);
    let (pw, ph) = (w - 2.0 * m, h - 2.0 * m);
    let attrs = format!(" data-x-min=\"0\" data-x-max=\"{TAU}\" data-y-min=\"{y_lo}\" data-y-max=\"{y_hi}\"");
    let mut s = open(w, h, &attrs);
    let _ = writeln!(s, "<rect class=\"frame\" x=\"{m}\" y=\"{m}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>");
    s.push_str("<g class=\"points\" fill=\"#4c72b0\">\n");
    for p in points.iter().filter(|p| p.x.is_finite() && p.y.is_finite()) {
        let x = m + p.x / TAU * pw;
        let y = m + ph - (p.y - y_lo) / (y_hi - y_lo) * ph;
        let _ = writeln!(s, "<circle class=\"pt\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"0.8\"/>");
    }
    s.push_str("</g>\n");
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">x</text>", w / 2.0, h - 12.0);
    let _ = writeln!(s, "<text x=\"12\" y=\"{}\" font-size=\"11\">y</text>", h / 2.0);
    let _ = writeln!(s, "<text x=\"{m}\" y=\"{}\" font-size=\"9\">0</text>", h - m + 12.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"end\">2pi</text>", w - m, h - m + 12.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"end\">{}</text>", m - 4.0, h - m, fmt_num(y_lo));
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"end\">{}</text>", m - 4.0, m + 8.0, fmt_num(y_hi));
    s.push_str("</svg>\n");
    Some(s)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
