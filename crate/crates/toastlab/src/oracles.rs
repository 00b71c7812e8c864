//! Independent brute-force oracles: augmenting-path maximum matching,
//! parity-subgraph existence by pruned edge-subset search, the uniform
//! boundary-connectivity constant on lattice windows by exhaustive
//! enumeration of small full sets, and small-graph corpus generators.
//! Oracles deliberately use different algorithms than the main modules.

use crate::error::{Error, Result};
use crate::graph::{Graph, Topology, VertexSet};
use crate::matching::Matching;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaximumMatching {
    pub matching: Matching,
    pub perfect: bool,
}

/// Maximum matching of a bipartite graph by repeated augmenting-path search
/// from each left vertex.
pub fn oracle_matching(g: &Graph) -> Result<MaximumMatching> {
    let colors = g
        .bipartition()
        .ok_or_else(|| Error::InvalidInput("graph is not bipartite".into()))?;
    let n = g.vertex_count();
    let mut partner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        g: &Graph,
        v: usize,
        partner: &mut Vec<Option<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for &w in g.neighbors(v) {
            if visited[w] {
                continue;
            }
            visited[w] = true;
            let free = match partner[w] {
                None => true,
                Some(m) => augment(g, m, partner, visited),
            };
            if free {
                partner[w] = Some(v);
                partner[v] = Some(w);
                return true;
            }
        }
        false
    }

    for v in 0..n {
        if !colors[v] && partner[v].is_none() {
            let mut visited = vec![false; n];
            augment(g, v, &mut partner, &mut visited);
        }
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .filter_map(|v| partner[v].map(|w| (v, w)))
        .filter(|&(v, w)| v < w)
        .collect();
    let perfect = (0..n).all(|v| partner[v].is_some());
    Ok(MaximumMatching {
        matching: Matching {
            edges: edges.into_iter().collect(),
        },
        perfect,
    })
}

/// True when some spanning subgraph has odd degree exactly on `P`. Pruned
/// depth-first search over edge subsets: a branch dies as soon as any vertex
/// finishes with the wrong parity.
pub fn oracle_parity_exists(g: &Graph, p: &VertexSet) -> Result<bool> {
    let n = g.vertex_count();
    if n > 20 {
        return Err(Error::InvalidParameter(
            "enumeration oracle is limited to 20 vertices".into(),
        ));
    }
    let want: Vec<bool> = (0..n).map(|v| p.contains(v)).collect();
    let edges = g.edges();
    for v in 0..n {
        if g.degree(v) == 0 && want[v] {
            return Ok(false);
        }
    }
    let mut left: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut parity = vec![false; n];

    fn rec(
        i: usize,
        edges: &[(usize, usize)],
        want: &[bool],
        left: &mut [usize],
        parity: &mut [bool],
    ) -> bool {
        if i == edges.len() {
            return parity.iter().zip(want).all(|(a, b)| a == b);
        }
        let (u, v) = edges[i];
        left[u] -= 1;
        left[v] -= 1;
        for take in [false, true] {
            if take {
                parity[u] = !parity[u];
                parity[v] = !parity[v];
            }
            let u_ok = left[u] > 0 || parity[u] == want[u];
            let v_ok = left[v] > 0 || parity[v] == want[v];
            if u_ok && v_ok && rec(i + 1, edges, want, left, parity) {
                // restore before returning
                if take {
                    parity[u] = !parity[u];
                    parity[v] = !parity[v];
                }
                left[u] += 1;
                left[v] += 1;
                return true;
            }
            if take {
                parity[u] = !parity[u];
                parity[v] = !parity[v];
            }
        }
        left[u] += 1;
        left[v] += 1;
        false
    }

    Ok(rec(0, &edges, &want, &mut left, &mut parity))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KappaReport {
    pub d: usize,
    pub window: Vec<usize>,
    pub max_set_size: usize,
    pub kappa: usize,
    pub witness_sets_checked: usize,
    pub failing_set_at_kappa_minus_1: VertexSet,
}

const KAPPA_SET_BUDGET: usize = 2_000_000;

/// Connected subsets of the lattice up to translation, as coordinate lists
/// normalized to non-negative coordinates with zero minimum per axis.
fn connected_shapes(d: usize, max_size: usize, budget: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut shapes: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    let mut frontier: Vec<Vec<Vec<i64>>> = Vec::new();
    if max_size == 0 {
        return Ok(Vec::new());
    }
    let origin = vec![vec![0i64; d]];
    shapes.insert(origin.clone());
    frontier.push(origin);
    for _ in 1..max_size {
        let mut next = Vec::new();
        for shape in &frontier {
            for cell in shape {
                for axis in 0..d {
                    for delta in [-1i64, 1] {
                        let mut grown = cell.clone();
                        grown[axis] += delta;
                        if shape.contains(&grown) {
                            continue;
                        }
                        let mut cells = shape.clone();
                        cells.push(grown);
                        // normalize to zero minimum per axis
                        let mins: Vec<i64> = (0..d)
                            .map(|a| cells.iter().map(|c| c[a]).min().unwrap())
                            .collect();
                        for c in &mut cells {
                            for a in 0..d {
                                c[a] -= mins[a];
                            }
                        }
                        cells.sort();
                        if shapes.insert(cells.clone()) {
                            next.push(cells);
                        }
                        if shapes.len() > budget {
                            return Err(Error::BudgetExceeded(format!(
                                "more than {budget} shapes (partial: sizes up to this point only)"
                            )));
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(shapes
        .into_iter()
        .map(|cells| {
            cells
                .into_iter()
                .map(|c| c.into_iter().map(|x| x as usize).collect())
                .collect()
        })
        .collect())
}

/// Finds the least radius `kappa <= kappa_max` such that the thickened
/// boundary of every enumerated connected full set (up to `max_set_size`
/// cells, placed at the window center) is connected, together with a set
/// failing at `kappa - 1`.
pub fn kappa_search(
    window_dims: &[usize],
    max_set_size: usize,
    kappa_max: usize,
) -> Result<KappaReport> {
    let g = Graph::build_grid(window_dims, Topology::Window)?;
    let d = window_dims.len();
    if kappa_max == 0 {
        return Err(Error::InvalidParameter("kappa_max must be >= 1".into()));
    }
    for &side in window_dims {
        if side < 2 * (kappa_max + 1) + max_set_size + 2 {
            return Err(Error::InvalidParameter(format!(
                "window side {side} too small: sets of size {max_set_size} must avoid the rim by {kappa_max}"
            )));
        }
    }
    let anchor: Vec<usize> = window_dims.iter().map(|&s| s / 2).collect();
    let shapes = connected_shapes(d, max_set_size, KAPPA_SET_BUDGET)?;

    let place = |shape: &Vec<Vec<usize>>| -> VertexSet {
        shape
            .iter()
            .map(|cell| {
                let coords: Vec<usize> =
                    cell.iter().zip(&anchor).map(|(&c, &a)| a + c).collect();
                g.index_of(&coords)
            })
            .collect()
    };

    let mut checked = 0usize;
    let mut full_sets: Vec<VertexSet> = Vec::new();
    for shape in &shapes {
        let set = place(shape);
        checked += 1;
        if g.is_full(&set)? {
            full_sets.push(set);
        }
    }

    let boundary_connected = |set: &VertexSet, kappa: usize| -> bool {
        let boundary = g.ball(set, kappa).difference(set);
        g.connected_components(&boundary).len() == 1
    };

    if max_set_size == 0 {
        return Ok(KappaReport {
            d,
            window: window_dims.to_vec(),
            max_set_size,
            kappa: 1,
            witness_sets_checked: 0,
            failing_set_at_kappa_minus_1: VertexSet::new(),
        });
    }

    for kappa in 1..=kappa_max {
        let all_pass = full_sets.iter().all(|s| boundary_connected(s, kappa));
        if all_pass {
            let failing = if kappa == 1 {
                VertexSet::new()
            } else {
                full_sets
                    .iter()
                    .find(|s| !boundary_connected(s, kappa - 1))
                    .cloned()
                    .unwrap_or_default()
            };
            return Ok(KappaReport {
                d,
                window: window_dims.to_vec(),
                max_set_size,
                kappa,
                witness_sets_checked: checked,
                failing_set_at_kappa_minus_1: failing,
            });
        }
    }
    Err(Error::BudgetExceeded(format!(
        "no uniform radius up to {kappa_max} works for all {checked} sets"
    )))
}

/// All connected graphs on 1..=max_n vertices up to isomorphism, as explicit
/// graphs with a canonical labeling. Grown by vertex augmentation with
/// lexicographically minimal canonical forms for deduplication.
pub fn connected_graphs_upto(max_n: usize) -> Result<Vec<Graph>> {
    if max_n == 0 || max_n > 8 {
        return Err(Error::InvalidParameter(
            "corpus enumeration supports 1..=8 vertices".into(),
        ));
    }
    // adjacency as bit rows
    type Rows = Vec<u16>;
    fn canonical(n: usize, rows: &Rows) -> u64 {
        // lexicographically minimal upper-triangle bitstring over all
        // labelings, bits ordered (0,1),(0,2),(1,2),(0,3),...
        fn rec(
            n: usize,
            rows: &Rows,
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
            prefix: u64,
            bits: u32,
            best: &mut u64,
            best_bits: u32,
        ) {
            let pos = perm.len();
            if pos == n {
                if prefix < *best {
                    *best = prefix;
                }
                return;
            }
            for cand in 0..n {
                if used[cand] {
                    continue;
                }
                let mut appended = 0u64;
                for (i, &p) in perm.iter().enumerate() {
                    if rows[p] >> cand & 1 == 1 {
                        appended |= 1 << (pos as u32 - 1 - i as u32);
                    }
                }
                let new_prefix = (prefix << pos) | appended;
                let new_bits = bits + pos as u32;
                // compare against the best value truncated to the same length
                if *best != u64::MAX {
                    let best_prefix = *best >> (best_bits - new_bits);
                    if new_prefix > best_prefix {
                        continue;
                    }
                }
                perm.push(cand);
                used[cand] = true;
                rec(n, rows, perm, used, new_prefix, new_bits, best, best_bits);
                perm.pop();
                used[cand] = false;
            }
        }
        let total_bits = (n * (n - 1) / 2) as u32;
        let mut best = u64::MAX;
        rec(
            n,
            rows,
            &mut Vec::new(),
            &mut vec![false; n],
            0,
            0,
            &mut best,
            total_bits,
        );
        best
    }

    let mut out = Vec::new();
    let mut current: Vec<Rows> = vec![vec![0u16]]; // the one-vertex graph
    out.push(Graph::from_edges(1, &[])?);
    for n in 2..=max_n {
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        let mut next: Vec<Rows> = Vec::new();
        for base in &current {
            for nbrs in 1u16..(1 << (n - 1)) {
                let mut rows = base.clone();
                rows.push(nbrs);
                for v in 0..n - 1 {
                    if nbrs >> v & 1 == 1 {
                        rows[v] |= 1 << (n - 1);
                    }
                }
                if seen.insert(canonical(n, &rows)) {
                    next.push(rows);
                }
            }
        }
        for rows in &next {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rows[u] >> v & 1 == 1 {
                        edges.push((u, v));
                    }
                }
            }
            out.push(Graph::from_edges(n, &edges)?);
        }
        current = next;
    }
    Ok(out)
}

/// Random connected graph: a random spanning tree plus `extra_edges` further
/// random edges (fewer if the graph saturates).
pub fn random_connected_graph<R: Rng>(n: usize, extra_edges: usize, rng: &mut R) -> Graph {
    assert!(n >= 1);
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    let mut attempts = 0usize;
    let mut added = 0usize;
    while added < extra_edges && attempts < 50 * extra_edges + 100 {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if edges.insert(e) {
            added += 1;
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    Graph::from_edges(n, &edges).unwrap()
}
