//! Two-panel SVG drawing of a solution, one tour per panel.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use b2tsp::{Instance, TwoTourSequence};

const PANEL: f64 = 400.0;
const MARGIN: f64 = 20.0;

/// Renders both tours side by side. Every node is drawn in each panel;
/// fixed nodes are squares, the depot is filled black.
pub fn render_svg(inst: &Instance, q: &TwoTourSequence) -> Result<String> {
    let Some(coords) = inst.coords() else {
        bail!("the instance has no coordinates to draw");
    };
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in coords {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let scale = (PANEL - 2.0 * MARGIN) / span;
    let at = |panel: usize, v: usize| {
        let (x, y) = coords[v];
        (
            panel as f64 * PANEL + MARGIN + (x - x0) * scale,
            PANEL - MARGIN - (y - y0) * scale,
        )
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = 2.0 * PANEL,
        h = PANEL
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{}" height="{PANEL}" fill="white"/>"#,
        2.0 * PANEL
    );
    let colours = ["#1f77b4", "#d62728"];
    for (panel, tour) in [q.tour1(), q.tour2()].into_iter().enumerate() {
        let _ = writeln!(s, r#"<g id="tour{}">"#, panel + 1);
        let _ = writeln!(
            s,
            r##"<text x="{:.3}" y="14" font-family="sans-serif" font-size="12">tour {}</text>"##,
            panel as f64 * PANEL + MARGIN,
            panel + 1
        );
        let mut points = String::new();
        for &v in std::iter::once(&0).chain(tour).chain(std::iter::once(&0)) {
            let (x, y) = at(panel, v);
            let _ = write!(points, "{x:.3},{y:.3} ");
        }
        let _ = writeln!(
            s,
            r#"<polyline class="tour" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points.trim_end(),
            colours[panel]
        );
        for v in 0..inst.n() {
            let (x, y) = at(panel, v);
            let fill = if v == 0 { "black" } else { "white" };
            if inst.is_fixed(v) {
                let _ = writeln!(
                    s,
                    r#"<rect class="node fixed" x="{:.3}" y="{:.3}" width="8" height="8" fill="{fill}" stroke="black"/>"#,
                    x - 4.0,
                    y - 4.0
                );
            } else {
                let _ = writeln!(
                    s,
                    r#"<circle class="node" cx="{x:.3}" cy="{y:.3}" r="3" fill="{fill}" stroke="gray"/>"#
                );
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use b2tsp::instance::{euclidean_matrix, Rounding};
    use b2tsp::DistanceMatrix;

    fn square() -> Instance {
        let pts = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        Instance::from_coords(pts, Rounding::Exact, &[0, 2], 1).unwrap()
    }

    #[test]
    fn markers_and_polylines() {
        let inst = square();
        let q = TwoTourSequence::from_tours(&[1, 2], &[2, 3]);
        let svg = render_svg(&inst, &q).unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches(r#"class="node"#).count(), 8);
        assert_eq!(svg.matches(r#"class="node fixed""#).count(), 4);
        assert_eq!(svg, render_svg(&inst, &q).unwrap());
    }

    #[test]
    fn needs_coordinates() {
        let m: DistanceMatrix = euclidean_matrix(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], Rounding::Exact).unwrap();
        let inst = Instance::new(m, &[0], 1).unwrap();
        let q = TwoTourSequence::from_tours(&[1], &[2]);
        assert!(render_svg(&inst, &q).is_err());
    }
}
