//! Deterministic SVG scatter rendering of scan results.
//!
//! Fixed 800x800 canvas, window-to-viewport affine map, one filled square
//! per grid node: interior nodes gray, zero-edge nodes colored by the first
//! covering subset (fixed palette keyed by subset rank), black when no
//! subset covers them. Identical inputs yield identical bytes.

use crate::csvio::CsvPoint;
use critset_core::kkt::Classification;
use std::fmt::Write as _;

pub const CANVAS: f64 = 800.0;
const MARGIN: f64 = 50.0;
const PLOT: f64 = CANVAS - 2.0 * MARGIN;

const INTERIOR_COLOR: &str = "#b3b3b3";
const AMBIGUOUS_COLOR: &str = "#e0c341";
const UNCOVERED_COLOR: &str = "#000000";

/// Palette keyed by subset lexicographic rank.
pub const PALETTE: &[&str] = &[
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf", "#8c564b", "#e377c2",
    "#bcbd22", "#7f7f7f",
];

/// Per-subset cover data used for coloring, already in subset rank order.
pub struct CoverColoring {
    /// Display labels, e.g. `{1,2}`.
    pub labels: Vec<String>,
    /// For each edge point: its coordinates and the covering subset ranks.
    pub edge_memberships: Vec<(Vec<f64>, Vec<usize>)>,
}

pub struct PlotSpec<'a> {
    pub window: [(f64, f64); 2],
    pub step: f64,
    pub points: &'a [CsvPoint],
    pub cover: Option<&'a CoverColoring>,
    pub title: &'a str,
}

fn px(spec: &PlotSpec, x: f64) -> f64 {
    MARGIN + (x - spec.window[0].0) / (spec.window[0].1 - spec.window[0].0) * PLOT
}

fn py(spec: &PlotSpec, y: f64) -> f64 {
    CANVAS - MARGIN - (y - spec.window[1].0) / (spec.window[1].1 - spec.window[1].0) * PLOT
}

/// Render the scatter; edge-point colors come from the cover memberships
/// when present (first covering subset wins), otherwise a dark neutral.
pub fn render(spec: &PlotSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"##,
        c = CANVAS
    );
    let _ = writeln!(s, r##"<rect width="{c}" height="{c}" fill="#ffffff"/>"##, c = CANVAS);
    let _ = writeln!(
        s,
        r##"<rect x="{m}" y="{m}" width="{p}" height="{p}" fill="none" stroke="#333333" stroke-width="1"/>"##,
        m = MARGIN,
        p = PLOT
    );
    let _ = writeln!(
        s,
        r##"<text x="{x:.2}" y="{y:.2}" font-family="monospace" font-size="14" fill="#333333">{t}</text>"##,
        x = MARGIN,
        y = MARGIN - 10.0,
        t = escape(spec.title)
    );
    // Corner coordinate labels.
    let _ = writeln!(
        s,
        r##"<text x="{x:.2}" y="{y:.2}" font-family="monospace" font-size="12" fill="#333333">({a},{b})</text>"##,
        x = MARGIN - 40.0,
        y = CANVAS - MARGIN + 20.0,
        a = spec.window[0].0,
        b = spec.window[1].0
    );
    let _ = writeln!(
        s,
        r##"<text x="{x:.2}" y="{y:.2}" font-family="monospace" font-size="12" fill="#333333">({a},{b})</text>"##,
        x = CANVAS - MARGIN - 40.0,
        y = MARGIN - 10.0,
        a = spec.window[0].1,
        b = spec.window[1].1
    );

    let wx = spec.step / (spec.window[0].1 - spec.window[0].0) * PLOT;
    let wy = spec.step / (spec.window[1].1 - spec.window[1].0) * PLOT;

    let square = |s: &mut String, x: f64, y: f64, color: &str| {
        let _ = writeln!(
            s,
            r##"<rect x="{px:.2}" y="{py:.2}" width="{wx:.2}" height="{wy:.2}" fill="{color}"/>"##,
            px = px(spec, x) - wx / 2.0,
            py = py(spec, y) - wy / 2.0,
        );
    };

    // Interior and ambiguous nodes first, edge nodes on top.
    for p in spec.points {
        match p.class {
            Classification::Interior => square(&mut s, p.x[0], p.x[1], INTERIOR_COLOR),
            Classification::BoundaryAmbiguous => {
                square(&mut s, p.x[0], p.x[1], AMBIGUOUS_COLOR)
            }
            _ => {}
        }
    }
    match spec.cover {
        Some(cover) => {
            for (x, subsets) in &cover.edge_memberships {
                let color = subsets
                    .first()
                    .map(|&r| PALETTE[r % PALETTE.len()])
                    .unwrap_or(UNCOVERED_COLOR);
                square(&mut s, x[0], x[1], color);
            }
        }
        None => {
            for p in spec.points {
                if p.class == Classification::ZeroEdge {
                    square(&mut s, p.x[0], p.x[1], "#404040");
                }
            }
        }
    }

    // Legend block.
    let mut y = MARGIN + 16.0;
    let legend_entry = |s: &mut String, color: &str, label: &str, y: f64| {
        let _ = writeln!(
            s,
            r##"<rect x="{x:.2}" y="{ry:.2}" width="12" height="12" fill="{color}"/>"##,
            x = MARGIN + 8.0,
            ry = y - 10.0,
        );
        let _ = writeln!(
            s,
            r##"<text x="{x:.2}" y="{y:.2}" font-family="monospace" font-size="13" fill="#111111">{t}</text>"##,
            x = MARGIN + 26.0,
            t = escape(label)
        );
    };
    legend_entry(&mut s, INTERIOR_COLOR, "interior", y);
    y += 18.0;
    if let Some(cover) = spec.cover {
        for (rank, label) in cover.labels.iter().enumerate() {
            legend_entry(&mut s, PALETTE[rank % PALETTE.len()], label, y);
            y += 18.0;
        }
        legend_entry(&mut s, UNCOVERED_COLOR, "edge (no subset)", y);
    } else {
        legend_entry(&mut s, "#404040", "edge candidates", y);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_plot_still_renders_frame_and_legend() {
        let spec = PlotSpec {
            window: [(-2.0, 2.0), (-2.0, 2.0)],
            step: 0.05,
            points: &[],
            cover: None,
            title: "empty",
        };
        let svg = render(&spec);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("interior"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let pts = vec![
            CsvPoint { x: vec![0.0, 0.0], class: Classification::Interior },
            CsvPoint { x: vec![0.5, 0.0], class: Classification::ZeroEdge },
        ];
        let spec = PlotSpec {
            window: [(-1.0, 1.0), (-1.0, 1.0)],
            step: 0.5,
            points: &pts,
            cover: None,
            title: "t",
        };
        assert_eq!(render(&spec), render(&spec));
    }
}
