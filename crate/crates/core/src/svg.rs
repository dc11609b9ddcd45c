//! Deterministic SVG drawings of embeddings.

use std::fmt::Write as _;

use crate::embedding::Embedding;

pub const VERTEX_RADIUS: f64 = 0.03;
const STROKE_WIDTH: f64 = 0.02;
const MARGIN: f64 = 0.05;
const HIGHLIGHT: &str = "#1f77b4";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Style {
    /// Fill vertices of this degree in a highlight colour.
    pub highlight_degree: Option<usize>,
}

/// Renders edges as lines and vertices as dots, in unit coordinates with
/// the y axis pointing down the page as in the original figures. Edges
/// tagged `red` are drawn in red.
pub fn render_svg(e: &Embedding, style: &Style) -> String {
    // SVG's y axis points down; embeddings are stored y-up.
    let pts: Vec<(f64, f64)> = e.vertices().iter().map(|p| (p.x, -p.y)).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let margin = MARGIN * (x1 - x0).max(y1 - y0).max(1.0);
    let (vx, vy) = (x0 - margin, y0 - margin);
    let (vw, vh) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{vx:.6} {vy:.6} {vw:.6} {vh:.6}\" width=\"{:.0}\" height=\"{:.0}\">",
        vw * 100.0,
        vh * 100.0
    );
    let _ = writeln!(s, "<title>{}</title>", escape(e.name()));
    let _ = writeln!(s, "<g stroke-width=\"{STROKE_WIDTH}\" stroke-linecap=\"round\">");
    for (i, ed) in e.edges().iter().enumerate() {
        let colour = if e.has_tag(i, "red") { "red" } else { "black" };
        let (a, b) = (pts[ed.a], pts[ed.b]);
        let _ = writeln!(
            s,
            "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"{colour}\"/>",
            a.0, a.1, b.0, b.1
        );
    }
    s.push_str("</g>\n<g>\n");
    for (v, &(x, y)) in pts.iter().enumerate() {
        let fill = match style.highlight_degree {
            Some(d) if e.degree(v) == d => HIGHLIGHT,
            _ => "black",
        };
        let _ = writeln!(s, "<circle cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"{VERTEX_RADIUS}\" fill=\"{fill}\"/>");
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
