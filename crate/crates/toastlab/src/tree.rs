//! Spanning forests with escape orientation built from a connected toast.
//! Each tile's residual gets a spanning tree, each tile gets one exit edge
//! into its parent's residual (or out of the covered region for maximal
//! tiles), and every vertex points toward its tile's exit. The verifier
//! includes the finite one-endedness proxy: deleting any single vertex
//! leaves exactly one escaping piece in that vertex's tree.

use crate::error::{Error, Result};
use crate::graph::{edge, EdgeSet, Graph, Topology, VertexSet};
use crate::report::Report;
use crate::toast::{layer_index, residual, strictly_inside, Toast};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::{BTreeMap, VecDeque};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EscapeTarget {
    Exterior,
    Vertex(usize),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TreeCertificate {
    pub tree_edges: EdgeSet,
    pub exit_vertices: BTreeMap<usize, usize>,
    pub exit_edges: EdgeSet,
    pub escape_orientation: BTreeMap<usize, EscapeTarget>,
}

/// Vertices outside the toast from which escape is witnessed: on a window,
/// those reaching the rim without touching the toast; elsewhere, everything
/// outside the toast.
fn escape_mask(g: &Graph, support: &VertexSet) -> Vec<bool> {
    let n = g.vertex_count();
    let mut allowed = vec![true; n];
    for v in support.iter() {
        allowed[v] = false;
    }
    match g.topology() {
        Topology::Window => {
            let dist = g.bfs_masked(
                g.window_exterior().iter().filter(|&v| !support.contains(v)),
                usize::MAX,
                Some(&allowed),
            );
            (0..n).map(|v| dist[v] != usize::MAX).collect()
        }
        _ => allowed,
    }
}

/// Builds the certificate. Requires connected residuals; maximal tiles need
/// an escaping neighbor outside the toast.
pub fn build_tree(g: &Graph, toast: &Toast) -> Result<TreeCertificate> {
    toast.validate(g)?;
    let support = toast.support();
    let escape = escape_mask(g, &support);
    let _ = layer_index(toast)?; // laminarity gate

    // minimal strictly containing tile, if any
    let parent_of: Vec<Option<usize>> = toast
        .tiles
        .iter()
        .map(|t| {
            toast
                .tiles
                .iter()
                .filter(|p| strictly_inside(t, p))
                .min_by_key(|p| (p.vertices.len(), p.level, p.id))
                .map(|p| p.id)
        })
        .collect();

    let mut cert = TreeCertificate::default();
    let mut tree_edges = Vec::new();
    let mut exit_edges = Vec::new();

    for (idx, tile) in toast.tiles.iter().enumerate() {
        let res = residual(toast, tile.id)?;
        if res.is_empty() {
            return Err(Error::InvalidToast(format!(
                "tile {} has an empty residual",
                tile.id
            )));
        }
        if g.connected_components(&res).len() != 1 {
            return Err(Error::InvalidToast(format!(
                "tile {} has a disconnected residual",
                tile.id
            )));
        }

        // exit vertex: least vertex of the tile with an eligible neighbor
        let parent_res = match parent_of[idx] {
            Some(pid) => Some(residual(toast, pid)?),
            None => None,
        };
        let eligible = |u: usize| -> bool {
            match &parent_res {
                Some(pr) => pr.contains(u),
                None => !support.contains(u) && escape[u],
            }
        };
        let mut exit = None;
        'search: for v in tile.vertices.iter() {
            for &u in g.neighbors(v) {
                if !tile.vertices.contains(u) && eligible(u) {
                    exit = Some((v, u));
                    break 'search;
                }
            }
        }
        let (v_exit, u_out) = exit.ok_or_else(|| {
            Error::NoEscape(format!(
                "tile {} has no neighbor outside itself that {}",
                tile.id,
                if parent_of[idx].is_some() {
                    "lands in the parent residual"
                } else {
                    "escapes the covered region"
                }
            ))
        })?;
        debug_assert!(res.contains(v_exit));

        // spanning tree of the residual, breadth-first from the least vertex
        let res_mask = res.mask(g.vertex_count());
        let root = res.first().unwrap();
        let mut seen = vec![false; g.vertex_count()];
        let mut tree_adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if res_mask[w] && !seen[w] {
                    seen[w] = true;
                    tree_edges.push(edge(v, w));
                    tree_adj.entry(v).or_default().push(w);
                    tree_adj.entry(w).or_default().push(v);
                    queue.push_back(w);
                }
            }
        }

        // orient the residual tree toward the exit vertex
        let mut oriented = vec![false; g.vertex_count()];
        oriented[v_exit] = true;
        let mut queue = VecDeque::from([v_exit]);
        cert.escape_orientation.insert(
            v_exit,
            if parent_of[idx].is_some() {
                EscapeTarget::Vertex(u_out)
            } else {
                EscapeTarget::Exterior
            },
        );
        while let Some(v) = queue.pop_front() {
            for &w in tree_adj.get(&v).map(|a| a.as_slice()).unwrap_or(&[]) {
                if !oriented[w] {
                    oriented[w] = true;
                    cert.escape_orientation.insert(w, EscapeTarget::Vertex(v));
                    queue.push_back(w);
                }
            }
        }

        cert.exit_vertices.insert(tile.id, v_exit);
        exit_edges.push(edge(v_exit, u_out));
    }

    cert.tree_edges = EdgeSet::from_vec(tree_edges);
    cert.exit_edges = EdgeSet::from_vec(exit_edges);
    Ok(cert)
}

/// Checks (a) spanning, (b) acyclicity, (c) out-degree one with walks that
/// leave the covered region, and (d) the one-end proxy: for every covered
/// vertex, deleting it leaves exactly one escaping component in its tree.
pub fn verify_tree(g: &Graph, toast: &Toast, cert: &TreeCertificate) -> Report {
    let mut report = Report::new();
    let support = toast.support();
    let escape = escape_mask(g, &support);

    // (a) spanning
    let domain: VertexSet = cert.escape_orientation.keys().copied().collect();
    let missing = support.difference(&domain);
    let extra = domain.difference(&support);
    report.push(
        "spanning",
        missing.is_empty() && extra.is_empty(),
        Some(json!({
            "missing": missing.first(),
            "not_in_toast": extra.first(),
        })),
    );

    // forest adjacency over all certificate edges
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut add = |a: usize, b: usize| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for (a, b) in cert.tree_edges.iter() {
        add(a, b);
    }
    for (a, b) in cert.exit_edges.iter() {
        add(a, b);
    }

    // (b) acyclic, via union-find over certificate edges
    let ids: Vec<usize> = adj.keys().copied().collect();
    let index: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut cycle_witness = None;
    for (a, b) in cert.tree_edges.iter().chain(cert.exit_edges.iter()) {
        let (ra, rb) = (find(&mut parent, index[&a]), find(&mut parent, index[&b]));
        if ra == rb {
            cycle_witness = Some(json!({"edge": [a, b]}));
            break;
        }
        parent[ra] = rb;
    }
    report.push("acyclic", cycle_witness.is_none(), cycle_witness);

    // (c) out-degree exactly one, oriented along certificate edges, and
    // every parent walk terminates outside the covered region
    let mut out_witness = None;
    for (&v, &target) in &cert.escape_orientation {
        match target {
            EscapeTarget::Vertex(u) => {
                let e = edge(v, u);
                if !cert.tree_edges.contains(e) && !cert.exit_edges.contains(e) {
                    out_witness = Some(json!({"vertex": v, "missing_edge": [e.0, e.1]}));
                    break;
                }
            }
            EscapeTarget::Exterior => {
                if !cert.exit_vertices.values().any(|&x| x == v) {
                    out_witness = Some(json!({"vertex": v, "error": "exterior without exit"}));
                    break;
                }
            }
        }
    }
    if out_witness.is_none() {
        'walks: for &start in cert.escape_orientation.keys() {
            let mut v = start;
            for _ in 0..=cert.escape_orientation.len() {
                match cert.escape_orientation.get(&v) {
                    Some(EscapeTarget::Vertex(u)) => {
                        if support.contains(*u) {
                            v = *u;
                        } else {
                            continue 'walks; // left the covered region
                        }
                    }
                    Some(EscapeTarget::Exterior) => continue 'walks,
                    None => continue 'walks,
                }
            }
            out_witness = Some(json!({"vertex": start, "error": "walk does not terminate"}));
            break;
        }
    }
    report.push("out_degree", out_witness.is_none(), out_witness);

    // (d) one-end proxy by exhaustive single-vertex deletion
    let escaping =
        |v: usize| -> bool { v < escape.len() && !support.contains(v) && escape[v] };
    let mut comp_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &v in &ids {
        if comp_of.contains_key(&v) {
            continue;
        }
        let cid = comps.len();
        let mut queue = VecDeque::from([v]);
        comp_of.insert(v, cid);
        let mut members = Vec::new();
        while let Some(x) = queue.pop_front() {
            members.push(x);
            for &w in &adj[&x] {
                if let std::collections::btree_map::Entry::Vacant(e) = comp_of.entry(w) {
                    e.insert(cid);
                    queue.push_back(w);
                }
            }
        }
        comps.push(members);
    }
    let proxy_witness = support
        .as_slice()
        .par_iter()
        .find_map_first(|&v| {
            let members = match comp_of.get(&v) {
                Some(&cid) => &comps[cid],
                None => return Some(json!({"vertex": v, "error": "not in forest"})),
            };
            let mut seen: BTreeMap<usize, bool> =
                members.iter().map(|&x| (x, false)).collect();
            seen.insert(v, true);
            let mut escaping_pieces = 0usize;
            for &start in members.iter() {
                if seen[&start] {
                    continue;
                }
                let mut queue = VecDeque::from([start]);
                seen.insert(start, true);
                let mut piece_escapes = false;
                while let Some(x) = queue.pop_front() {
                    if escaping(x) {
                        piece_escapes = true;
                    }
                    for &w in &adj[&x] {
                        if w != v && !seen[&w] {
                            seen.insert(w, true);
                            queue.push_back(w);
                        }
                    }
                }
                if piece_escapes {
                    escaping_pieces += 1;
                }
            }
            if escaping_pieces == 1 {
                None
            } else {
                Some(json!({"vertex": v, "escaping_components": escaping_pieces}))
            }
        });
    report.push("one_end_proxy", proxy_witness.is_none(), proxy_witness);
    report
}

/// Graphviz export: solid tree edges, dashed exit edges, arrowheads along
/// the escape orientation. Lattice graphs pin node positions.
pub fn tree_dot(g: &Graph, cert: &TreeCertificate) -> String {
    let mut out = String::from("digraph escape_forest {\n  node [shape=point];\n");
    let mut vertices: Vec<usize> = cert.escape_orientation.keys().copied().collect();
    for (a, b) in cert.tree_edges.iter().chain(cert.exit_edges.iter()) {
        vertices.push(a);
        vertices.push(b);
    }
    vertices.sort_unstable();
    vertices.dedup();
    for v in &vertices {
        if let Some(c) = g.coords(*v) {
            let ys = c.first().copied().unwrap_or(0);
            let xs = c.get(1).copied().unwrap_or(0);
            out.push_str(&format!("  v{v} [pos=\"{xs},{ys}!\"];\n"));
        } else {
            out.push_str(&format!("  v{v};\n"));
        }
    }
    for (&v, &target) in &cert.escape_orientation {
        let u = match target {
            EscapeTarget::Vertex(u) => u,
            EscapeTarget::Exterior => match cert
                .exit_edges
                .iter()
                .find(|&(a, b)| a == v || b == v)
            {
                Some((a, b)) => {
                    if a == v {
                        b
                    } else {
                        a
                    }
                }
                None => continue,
            },
        };
        let style = if cert.exit_edges.contains(edge(v, u)) {
            " [style=dashed]"
        } else {
            ""
        };
        out.push_str(&format!("  v{v} -> v{u}{style};\n"));
    }
    out.push_str("}\n");
    out
}
