//! Static SVG exports for 2-d lattice graphs: tile maps, edge orientations,
//! and matchings. Torus wrap edges are drawn as stubs leaving the frame.

use crate::graph::{Graph, VertexSet};
use crate::matching::Matching;
use crate::orientation::Orientation;
use crate::toast::Toast;
use crate::tree::TreeCertificate;
use std::fmt::Write;

const CELL: f64 = 14.0;
const PAD: f64 = 10.0;

const LEVEL_COLORS: [&str; 6] = [
    "#8dd3c7", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#bc80bd",
];

fn xy(g: &Graph, v: usize) -> (f64, f64) {
    let c = g.coords(v).unwrap_or_default();
    let row = c.first().copied().unwrap_or(0) as f64;
    let col = c.get(1).copied().unwrap_or(0) as f64;
    (PAD + col * CELL, PAD + row * CELL)
}

fn open_svg(g: &Graph) -> String {
    let rows = g.dims().first().copied().unwrap_or(1) as f64;
    let cols = g.dims().get(1).copied().unwrap_or(1) as f64;
    let (w, h) = (2.0 * PAD + (cols - 1.0) * CELL, 2.0 * PAD + (rows - 1.0) * CELL);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.0} {h:.0}\" width=\"{w:.0}\" height=\"{h:.0}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
    )
}

fn is_wrap(g: &Graph, u: usize, v: usize) -> bool {
    match (g.coords(u), g.coords(v)) {
        (Some(a), Some(b)) => a
            .iter()
            .zip(&b)
            .any(|(&x, &y)| x.abs_diff(y) > 1),
        _ => false,
    }
}

fn edge_lines(g: &Graph, u: usize, v: usize) -> Vec<((f64, f64), (f64, f64))> {
    let (x1, y1) = xy(g, u);
    let (x2, y2) = xy(g, v);
    if !is_wrap(g, u, v) {
        return vec![((x1, y1), (x2, y2))];
    }
    // wrap edge: draw two stubs pointing off the frame
    let stub = CELL * 0.4;
    let dir = |a: f64, b: f64| -> f64 {
        if (a - b).abs() <= CELL {
            (b - a).signum()
        } else {
            (a - b).signum()
        }
    };
    let (dx, dy) = (dir(x1, x2), dir(y1, y2));
    vec![
        ((x1, y1), (x1 + dx * stub, y1 + dy * stub)),
        ((x2, y2), (x2 - dx * stub, y2 - dy * stub)),
    ]
}

fn draw_lattice(out: &mut String, g: &Graph, stroke: &str) {
    for (u, v) in g.edges() {
        for ((x1, y1), (x2, y2)) in edge_lines(g, u, v) {
            let _ = writeln!(
                out,
                "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"{stroke}\" stroke-width=\"0.6\"/>"
            );
        }
    }
}

/// Tiles as colored squares (one color per level) over the lattice.
pub fn svg_toast(g: &Graph, toast: &Toast) -> String {
    let mut out = open_svg(g);
    draw_lattice(&mut out, g, "#dddddd");
    let mut tiles: Vec<_> = toast.tiles.iter().collect();
    tiles.sort_by_key(|t| std::cmp::Reverse(t.level));
    for tile in tiles {
        let color = LEVEL_COLORS[(tile.level - 1) % LEVEL_COLORS.len()];
        let r = 0.32 * CELL + 0.06 * CELL * (tile.level as f64 - 1.0);
        for v in tile.vertices.iter() {
            let (x, y) = xy(g, v);
            let _ = writeln!(
                out,
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"{color}\" fill-opacity=\"0.85\"/>",
                x - r,
                y - r,
                2.0 * r,
                2.0 * r
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// One arrow per oriented edge.
pub fn svg_orientation(g: &Graph, o: &Orientation) -> String {
    let mut out = open_svg(g);
    out.push_str(
        "<defs><marker id=\"a\" viewBox=\"0 0 6 6\" refX=\"5\" refY=\"3\" markerWidth=\"4\" markerHeight=\"4\" orient=\"auto\">\
         <path d=\"M0,0 L6,3 L0,6 z\" fill=\"#2b6cb0\"/></marker></defs>\n",
    );
    for (tail, head) in o.arcs() {
        for (i, ((x1, y1), (x2, y2))) in edge_lines(g, tail, head).into_iter().enumerate() {
            let marker = if i == 0 { " marker-end=\"url(#a)\"" } else { "" };
            let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
            let _ = writeln!(
                out,
                "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{mx:.1}\" y2=\"{my:.1}\" stroke=\"#2b6cb0\" stroke-width=\"1.1\"{marker}/>"
            );
            let _ = writeln!(
                out,
                "<line x1=\"{mx:.1}\" y1=\"{my:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"#2b6cb0\" stroke-width=\"1.1\"/>"
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Matched edges bold over a faint lattice.
pub fn svg_matching(g: &Graph, m: &Matching) -> String {
    let mut out = open_svg(g);
    draw_lattice(&mut out, g, "#dddddd");
    for (u, v) in m.edges.iter() {
        for ((x1, y1), (x2, y2)) in edge_lines(g, u, v) {
            let _ = writeln!(
                out,
                "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"#c53030\" stroke-width=\"2.4\" stroke-linecap=\"round\"/>"
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Escape forest: solid tree edges, dashed exits, covered set shaded.
pub fn svg_tree(g: &Graph, toast: &Toast, cert: &TreeCertificate) -> String {
    let mut out = open_svg(g);
    draw_lattice(&mut out, g, "#eeeeee");
    let support: VertexSet = toast.support();
    for v in support.iter() {
        let (x, y) = xy(g, v);
        let _ = writeln!(
            out,
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"1.6\" fill=\"#a0aec0\"/>"
        );
    }
    for (u, v) in cert.tree_edges.iter() {
        for ((x1, y1), (x2, y2)) in edge_lines(g, u, v) {
            let _ = writeln!(
                out,
                "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"#276749\" stroke-width=\"1.4\"/>"
            );
        }
    }
    for (u, v) in cert.exit_edges.iter() {
        for ((x1, y1), (x2, y2)) in edge_lines(g, u, v) {
            let _ = writeln!(
                out,
                "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"#c05621\" stroke-width=\"1.6\" stroke-dasharray=\"3 2\"/>"
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
