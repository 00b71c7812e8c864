//! Browser demo bindings: generate a toast on a lattice torus and render it,
//! its balanced orientation, or a perfect matching as SVG.

use toastlab::graph::{Graph, Topology};
use toastlab::levels::{fill_levels, generate_level_sets, levels_to_toast};
use toastlab::matching::{perfect_matching, verify_matching};
use toastlab::orientation::{balanced_orientation, verify_balanced};
use toastlab::render;
use toastlab::toast::{verify_toast, Toast};
use wasm_bindgen::prelude::*;

fn pipeline(side: usize, levels: usize, seed: u64) -> Result<(Graph, Toast), JsValue> {
    let g = Graph::build_grid(&[side, side], Topology::Torus).map_err(err)?;
    let ls = generate_level_sets(&g, 1, levels, 8, seed).map_err(err)?;
    let filled = fill_levels(&g, &ls).map_err(err)?;
    let toast = levels_to_toast(&g, &filled);
    Ok((g, toast))
}

fn err(e: toastlab::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// SVG of the tile decomposition on a side x side torus.
#[wasm_bindgen]
pub fn demo_toast(side: usize, levels: usize, seed: u64) -> Result<String, JsValue> {
    let (g, toast) = pipeline(side, levels, seed)?;
    Ok(render::svg_toast(&g, &toast))
}

/// SVG of a balanced orientation obtained by peeling cycles through the
/// toast levels.
#[wasm_bindgen]
pub fn demo_orientation(side: usize, levels: usize, seed: u64) -> Result<String, JsValue> {
    let (g, toast) = pipeline(side, levels, seed)?;
    let run = balanced_orientation(&g, &toast).map_err(err)?;
    Ok(render::svg_orientation(&g, &run.orientation))
}

/// SVG of a perfect matching rounded from the uniform 1/4 fractional state.
#[wasm_bindgen]
pub fn demo_matching(side: usize, levels: usize, seed: u64) -> Result<String, JsValue> {
    let (g, toast) = pipeline(side, levels, seed)?;
    let outcome = perfect_matching(&g, &toast, 4).map_err(err)?;
    Ok(render::svg_matching(&g, &outcome.matching))
}

/// JSON summary: tile counts, axiom checks, and certificate sizes.
#[wasm_bindgen]
pub fn demo_stats(side: usize, levels: usize, seed: u64) -> Result<String, JsValue> {
    let (g, toast) = pipeline(side, levels, seed)?;
    let toast_report = verify_toast(&g, &toast);
    let run = balanced_orientation(&g, &toast).map_err(err)?;
    let orient_report = verify_balanced(&g, &run.orientation);
    let outcome = perfect_matching(&g, &toast, 4).map_err(err)?;
    let match_report = verify_matching(&g, &outcome.matching);
    let body = serde_json::json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "tiles": toast.tiles.len(),
        "toast_checks": toast_report.checks.iter().map(|c| (c.name.clone(), c.pass)).collect::<Vec<_>>(),
        "cycles_peeled": run.cycles.len(),
        "orientation_balanced": orient_report.pass(),
        "matching_edges": outcome.matching.edges.len(),
        "matching_perfect": match_report.pass(),
        "circuits_applied": outcome.circuits.len(),
    });
    Ok(body.to_string())
}
