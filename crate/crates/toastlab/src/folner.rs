//! Følner pairs on lattice windows (thickness-2 shells around l1 balls) and
//! the finite verifier for families of sets with connected, pairwise-disjoint
//! shells that swallow every enclosed finite component.

use crate::error::{Error, Result};
use crate::graph::{BoundaryMode, Graph, Topology, VertexSet};
use crate::ratio::Ratio;
use crate::report::Report;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FolnerPair {
    pub n: usize,
    pub f: VertexSet,
    pub b: VertexSet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsoMember {
    pub f: VertexSet,
    pub b_f: VertexSet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsoFamily {
    pub members: Vec<IsoMember>,
}

/// Canonical family on the Z^d lattice: `F = B_{n-2}` inside `B = B_n`, so
/// the shell is two layers thick. One layer is not enough: the l1 sphere is
/// an independent set, hence disconnected.
pub fn folner_sets(d: usize, n: usize) -> Result<(Graph, FolnerPair)> {
    if d < 2 {
        return Err(Error::InvalidParameter("dimension must be >= 2".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("shell parameter must be >= 2".into()));
    }
    let side = 2 * (n + 1) + 1;
    let g = Graph::build_grid(&vec![side; d], Topology::Window)?;
    let center = VertexSet::singleton(g.index_of(&vec![n + 1; d]));
    let f = g.ball(&center, n - 2);
    let b = g.ball(&center, n);
    Ok((g, FolnerPair { n, f, b }))
}

/// Checks the three shell conditions: `∂F ⊆ B − F`, the shell induces a
/// connected subgraph, and `|B − F| / |F| < epsilon`.
pub fn verify_folner(g: &Graph, pair: &FolnerPair, epsilon: Ratio) -> Report {
    let mut report = Report::new();
    let shell = pair.b.difference(&pair.f);

    report.push(
        "folner_nested",
        pair.f.is_subset(&pair.b),
        None,
    );

    let boundary = g
        .boundary(&pair.f, 1, BoundaryMode::Outer)
        .unwrap_or_default();
    let stray = boundary.difference(&shell);
    report.push(
        "folner_boundary",
        stray.is_empty(),
        stray.first().map(|v| json!({"vertex": v})),
    );

    let comps = g.connected_components(&shell).len();
    report.push(
        "folner_shell_connected",
        comps == 1,
        Some(json!({"components": comps})),
    );

    if pair.f.is_empty() {
        report.push("folner_ratio", false, Some(json!({"error": "empty F"})));
    } else {
        let ratio = Ratio::new(shell.len() as u64, pair.f.len() as u64);
        report.push(
            "folner_ratio",
            ratio < epsilon,
            Some(json!({"ratio": ratio, "epsilon": epsilon})),
        );
    }
    report
}

/// Finite analogue of the connected isoperimetric family conditions:
/// (1) the visible boundary of each member sits inside its shell,
/// (2) each shell is connected,
/// (3) shells avoid every other member,
/// (4) enclosed finite components of the complement lie inside the shells.
/// Also returns `|⋃(B_F − F)| / |⋃F|`.
pub fn verify_iso_family(g: &Graph, fam: &IsoFamily) -> Result<(Report, Ratio)> {
    if g.topology() != Topology::Window {
        return Err(Error::UnsupportedTopology(
            "the visible boundary needs window topology".into(),
        ));
    }
    if fam.members.is_empty() {
        return Err(Error::UndefinedRatio("empty family".into()));
    }
    let mut report = Report::new();

    let mut nested = true;
    for m in &fam.members {
        nested &= m.f.is_subset(&m.b_f);
    }
    report.push("iso_nested", nested, None);

    let mut vis_witness = None;
    for (i, m) in fam.members.iter().enumerate() {
        let shell = m.b_f.difference(&m.f);
        let vis = g.boundary(&m.f, 1, BoundaryMode::Visible)?;
        if let Some(v) = vis.difference(&shell).first() {
            vis_witness = Some(json!({"member": i, "vertex": v}));
            break;
        }
    }
    report.push("iso_visible_boundary", vis_witness.is_none(), vis_witness);

    let mut conn_witness = None;
    for (i, m) in fam.members.iter().enumerate() {
        let shell = m.b_f.difference(&m.f);
        if g.connected_components(&shell).len() != 1 {
            conn_witness = Some(json!({"member": i}));
            break;
        }
    }
    report.push("iso_shell_connected", conn_witness.is_none(), conn_witness);

    let mut disj_witness = None;
    'outer: for (i, m) in fam.members.iter().enumerate() {
        for (j, other) in fam.members.iter().enumerate() {
            if i != j && !m.b_f.is_disjoint(&other.f) {
                disj_witness = Some(json!({"members": [i, j]}));
                break 'outer;
            }
        }
    }
    report.push("iso_disjoint", disj_witness.is_none(), disj_witness);

    let mut all_f = VertexSet::new();
    let mut all_b = VertexSet::new();
    for m in &fam.members {
        all_f = all_f.union(&m.f);
        all_b = all_b.union(&m.b_f);
    }
    let complement: VertexSet = (0..g.vertex_count())
        .filter(|&v| !all_f.contains(v))
        .collect();
    let mut comp_witness = None;
    for comp in g.connected_components(&complement) {
        let escapes = comp.iter().any(|v| g.window_exterior().contains(v));
        if !escapes && !comp.is_subset(&all_b) {
            comp_witness = Some(json!({"component_min_vertex": comp.first()}));
            break;
        }
    }
    report.push("iso_finite_components", comp_witness.is_none(), comp_witness);

    // the escape proxy behind the visible boundary is only a modeling
    // choice near the rim, so members whose shells get close are flagged
    let near_rim: Vec<usize> = fam
        .members
        .iter()
        .enumerate()
        .filter(|(_, m)| !g.ball(&m.b_f, 1).is_disjoint(g.window_exterior()))
        .map(|(i, _)| i)
        .collect();
    report.push(
        "iso_rim_contact",
        true,
        Some(json!({
            "members_near_rim": near_rim.iter().take(4).collect::<Vec<_>>(),
            "count": near_rim.len(),
        })),
    );

    if all_f.is_empty() {
        return Err(Error::UndefinedRatio("members cover no vertices".into()));
    }
    let shell_union = all_b.difference(&all_f);
    let ratio = Ratio::new(shell_union.len() as u64, all_f.len() as u64);
    Ok((report, ratio))
}
