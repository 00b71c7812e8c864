//! Fractional perfect matchings quantized to multiples of 1/d, alternating
//! circuits that preserve vertex sums exactly, rounding of all edges inside a
//! tile using cycles found in the non-integral support of an ancestor chain,
//! and the toast-driven perfect matching of d-regular bipartite graphs.

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, EdgeSet, Graph, VertexSet};
use crate::orientation::Cycle;
use crate::report::Report;
use crate::toast::{layer_index, strictly_inside, verify_toast, Toast};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::{BTreeMap, VecDeque};

/// Edge weights as integer numerators over a fixed denominator `d`; a valid
/// state has every vertex's incident numerators summing to `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalMatching {
    d: usize,
    num: BTreeMap<Edge, usize>,
}

impl FractionalMatching {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn numerator(&self, e: Edge) -> usize {
        self.num.get(&edge(e.0, e.1)).copied().unwrap_or(0)
    }

    pub fn is_integral(&self, e: Edge) -> bool {
        let j = self.numerator(e);
        j == 0 || j == self.d
    }

    pub fn edges(&self) -> impl Iterator<Item = (Edge, usize)> + '_ {
        self.num.iter().map(|(&e, &j)| (e, j))
    }

    /// Edges with numerator strictly between 0 and d.
    pub fn support(&self) -> EdgeSet {
        self.num
            .iter()
            .filter(|&(_, &j)| j > 0 && j < self.d)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Edges carrying the full weight d.
    pub fn saturated(&self) -> EdgeSet {
        self.num
            .iter()
            .filter(|&(_, &j)| j == self.d)
            .map(|(&e, _)| e)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct FractionalJson {
    d: usize,
    num: Vec<(usize, usize, usize)>,
}

impl Serialize for FractionalMatching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FractionalJson {
            d: self.d,
            num: self.num.iter().map(|(&(u, v), &j)| (u, v, j)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FractionalMatching {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = FractionalJson::deserialize(d)?;
        Ok(FractionalMatching {
            d: json.d,
            num: json.num.into_iter().map(|(u, v, j)| (edge(u, v), j)).collect(),
        })
    }
}

/// A set of pairwise vertex-disjoint edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching {
    pub edges: EdgeSet,
}

/// Everything needed to replay one alternating circuit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitRecord {
    /// the edge being rounded
    pub target: Edge,
    pub e_prime: Edge,
    /// index into the ancestor chain whose region hosted the cycle
    pub region: usize,
    pub cycle: Vec<usize>,
    pub eps: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchingOutcome {
    pub matching: Matching,
    pub fractional: FractionalMatching,
    pub circuits: Vec<CircuitRecord>,
}

/// Uniform 1/d state on a d-regular graph.
pub fn init_fractional(g: &Graph, d: usize) -> Result<FractionalMatching> {
    if d == 0 {
        return Err(Error::InvalidInput("denominator must be positive".into()));
    }
    for v in 0..g.vertex_count() {
        if g.degree(v) != d {
            return Err(Error::InvalidInput(format!(
                "vertex {v} has degree {} in a supposedly {d}-regular graph",
                g.degree(v)
            )));
        }
    }
    Ok(FractionalMatching {
        d,
        num: g.edges().into_iter().map(|e| (e, 1)).collect(),
    })
}

/// Adds `eps` to edges at even walk distance from `e_prime` along the cycle
/// and subtracts it at odd distance. Vertex sums are untouched; numerators
/// must stay inside `[0, d]`.
pub fn apply_circuit(
    f: &FractionalMatching,
    cycle: &Cycle,
    e_prime: Edge,
    eps: usize,
) -> Result<FractionalMatching> {
    if eps == 0 {
        return Err(Error::InvalidParameter("eps must be >= 1".into()));
    }
    if !cycle.edge_count().is_multiple_of(2) {
        return Err(Error::ParityError(format!(
            "alternating circuit needs an even cycle, got {} edges",
            cycle.edge_count()
        )));
    }
    let e_prime = edge(e_prime.0, e_prime.1);
    let steps: Vec<Edge> = cycle.steps().map(|(a, b)| edge(a, b)).collect();
    let anchor = steps
        .iter()
        .position(|&e| e == e_prime)
        .ok_or_else(|| Error::InvalidParameter("e_prime is not on the cycle".into()))?;
    let mut out = f.clone();
    for (i, e) in steps.iter().enumerate() {
        let j = out
            .num
            .get_mut(e)
            .ok_or_else(|| Error::InvalidParameter(format!("({}, {}) not in matching", e.0, e.1)))?;
        if (i + anchor) % 2 == 0 {
            *j = j
                .checked_add(eps)
                .filter(|&x| x <= f.d)
                .ok_or(Error::OutOfRange(e.0, e.1))?;
        } else {
            *j = j.checked_sub(eps).ok_or(Error::OutOfRange(e.0, e.1))?;
        }
    }
    #[cfg(debug_assertions)]
    {
        let sums_of = |fm: &FractionalMatching| {
            let mut sums: BTreeMap<usize, usize> = BTreeMap::new();
            for (&(u, v), &j) in &fm.num {
                *sums.entry(u).or_default() += j;
                *sums.entry(v).or_default() += j;
            }
            sums
        };
        debug_assert_eq!(sums_of(f), sums_of(&out), "circuit changed a vertex sum");
    }
    Ok(out)
}

/// Shortest support path from `e.1` back to `e.0` avoiding `e` itself,
/// restricted to `region`; closing it with `e` gives the circuit.
fn support_cycle(
    g: &Graph,
    f: &FractionalMatching,
    e: Edge,
    region: &VertexSet,
) -> Option<Cycle> {
    if !region.contains(e.0) || !region.contains(e.1) {
        return None;
    }
    let (from, to) = (e.1, e.0);
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    'bfs: while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            let fedge = edge(v, w);
            if fedge == e || !region.contains(w) || prev.contains_key(&w) {
                continue;
            }
            let j = f.numerator(fedge);
            if j == 0 || j == f.d {
                continue;
            }
            prev.insert(w, v);
            if w == to {
                break 'bfs;
            }
            queue.push_back(w);
        }
    }
    if !prev.contains_key(&to) {
        return None;
    }
    let mut back = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[&cur];
        back.push(cur);
    }
    back.reverse(); // from .. to
    let mut walk = Vec::with_capacity(back.len() + 1);
    walk.push(e.0);
    walk.extend(back);
    Cycle::new(g, walk).ok()
}

/// Rounds every edge induced on the first chain tile to 0 or d. Cycles are
/// searched in the non-integral support of the smallest sufficient chain
/// region, so edges outside the last tile and already integral edges are
/// never touched. Each edge needs at most d-1 unit circuits.
pub fn round_tile(
    g: &Graph,
    f: &FractionalMatching,
    chain: &[usize],
    toast: &Toast,
) -> Result<(FractionalMatching, Vec<CircuitRecord>)> {
    if chain.is_empty() {
        return Err(Error::InvalidParameter("empty chain".into()));
    }
    let mut tiles = Vec::with_capacity(chain.len());
    for &id in chain {
        tiles.push(
            toast
                .tile(id)
                .ok_or_else(|| Error::NotFound(format!("tile {id}")))?,
        );
    }
    for w in tiles.windows(2) {
        if !w[0].vertices.is_subset(&w[1].vertices) {
            return Err(Error::InvalidParameter(format!(
                "chain tiles {} and {} are not nested",
                w[0].id, w[1].id
            )));
        }
    }
    let inner_edges: Vec<Edge> = g.induced_edges(&tiles[0].vertices).iter().collect();
    let budget = f.d * inner_edges.len().max(1);
    let mut out = f.clone();
    let mut log = Vec::new();
    for &e in &inner_edges {
        while !out.is_integral(e) {
            if log.len() > budget {
                return Err(Error::ChainTooShort(e.0, e.1));
            }
            let mut found = None;
            for (idx, tile) in tiles.iter().enumerate() {
                if let Some(c) = support_cycle(g, &out, e, &tile.vertices) {
                    found = Some((idx, c));
                    break;
                }
            }
            let (region, cycle) = found.ok_or(Error::ChainTooShort(e.0, e.1))?;
            // push toward the nearer integer, ties toward zero
            let j = out.numerator(e);
            let e_prime = if j > f.d - j {
                e
            } else {
                let (a, b) = cycle.steps().nth(1).unwrap();
                edge(a, b)
            };
            #[cfg(debug_assertions)]
            let saturated_before = out.saturated();
            out = apply_circuit(&out, &cycle, e_prime, 1)?;
            #[cfg(debug_assertions)]
            {
                for se in saturated_before.iter() {
                    debug_assert_eq!(out.numerator(se), out.d, "saturated edge changed");
                }
                debug_assert!(support_min_degree_ok(g, &out), "support grew a leaf");
            }
            log.push(CircuitRecord {
                target: e,
                e_prime,
                region,
                cycle: cycle.vertices().to_vec(),
                eps: 1,
            });
        }
    }
    Ok((out, log))
}

#[cfg(debug_assertions)]
fn support_min_degree_ok(g: &Graph, f: &FractionalMatching) -> bool {
    let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
    for (e, _) in f.support().iter().map(|e| (e, ())) {
        *deg.entry(e.0).or_default() += 1;
        *deg.entry(e.1).or_default() += 1;
    }
    let _ = g;
    deg.values().all(|&d| d >= 2)
}

/// Toast-driven perfect matching of a d-regular bipartite graph: start from
/// the uniform 1/d state and round tiles in layer order, each inside its own
/// ancestor chain. When the toast covers the graph, every edge ends integral
/// and the saturated edges form a perfect matching.
pub fn perfect_matching(g: &Graph, toast: &Toast, d: usize) -> Result<MatchingOutcome> {
    if g.bipartition().is_none() {
        return Err(Error::InvalidInput("graph is not bipartite".into()));
    }
    toast.validate(g)?;
    let report = verify_toast(g, toast);
    for name in ["T1", "T2", "T3"] {
        if !report.check(name).is_some_and(|c| c.pass) {
            return Err(Error::InvalidToast(format!("verification fails {name}")));
        }
    }
    let mut f = init_fractional(g, d)?;
    let layer_of = layer_index(toast)?;
    let mut order: Vec<usize> = (0..toast.tiles.len()).collect();
    order.sort_by_key(|&i| (layer_of[i], toast.tiles[i].id));

    let mut circuits = Vec::new();
    for &i in &order {
        let tile = &toast.tiles[i];
        let mut ancestors: Vec<&crate::toast::Tile> = toast
            .tiles
            .iter()
            .filter(|t| strictly_inside(tile, t))
            .collect();
        ancestors.sort_by_key(|t| (t.vertices.len(), t.level, t.id));
        let mut chain = vec![tile.id];
        chain.extend(ancestors.iter().map(|t| t.id));
        let (next, log) = round_tile(g, &f, &chain, toast)?;
        f = next;
        circuits.extend(log);
    }
    Ok(MatchingOutcome {
        matching: Matching {
            edges: f.saturated(),
        },
        fractional: f,
        circuits,
    })
}

/// Per-vertex sums equal d, numerators quantized into range, edges real.
pub fn verify_fractional(g: &Graph, f: &FractionalMatching) -> Report {
    let mut report = Report::new();
    let mut alien = None;
    let mut range = None;
    for (e, j) in f.edges() {
        if !g.has_edge(e.0, e.1) {
            alien = Some(e);
        }
        if j > f.d() {
            range = Some(json!({"edge": e, "numerator": j, "d": f.d()}));
        }
    }
    report.push("edges_exist", alien.is_none(), alien.map(|e| json!({"edge": e})));
    report.push("range", range.is_none(), range);

    let mut sums = vec![0usize; g.vertex_count()];
    for (e, j) in f.edges() {
        if e.0 < g.vertex_count() && e.1 < g.vertex_count() {
            sums[e.0] += j;
            sums[e.1] += j;
        }
    }
    let bad: Vec<usize> = (0..g.vertex_count()).filter(|&v| sums[v] != f.d()).collect();
    report.push(
        "vertex_sums",
        bad.is_empty(),
        Some(json!({
            "violations": bad.iter().take(4).collect::<Vec<_>>(),
            "count": bad.len(),
        })),
    );
    report
}

/// Edges real and pairwise disjoint; "perfect" covers every vertex.
pub fn verify_matching(g: &Graph, m: &Matching) -> Report {
    let mut report = Report::new();
    let mut alien = None;
    for e in m.edges.iter() {
        if !g.has_edge(e.0, e.1) {
            alien = Some(e);
            break;
        }
    }
    report.push("edges_exist", alien.is_none(), alien.map(|e| json!({"edge": e})));

    let mut times = vec![0usize; g.vertex_count()];
    for (u, v) in m.edges.iter() {
        if u < g.vertex_count() {
            times[u] += 1;
        }
        if v < g.vertex_count() {
            times[v] += 1;
        }
    }
    let shared: Vec<usize> = (0..g.vertex_count()).filter(|&v| times[v] > 1).collect();
    report.push(
        "disjoint",
        shared.is_empty(),
        Some(json!({"shared_vertices": shared.iter().take(4).collect::<Vec<_>>()})),
    );
    let uncovered: Vec<usize> = (0..g.vertex_count()).filter(|&v| times[v] == 0).collect();
    report.push(
        "perfect",
        uncovered.is_empty(),
        Some(json!({
            "uncovered": uncovered.iter().take(4).collect::<Vec<_>>(),
            "count": uncovered.len(),
        })),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Topology;
    use crate::levels::{fill_levels, generate_level_sets, levels_to_toast};
    use crate::toast::{Tile, ToastFlags};

    fn cycle_graph(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn whole_graph_toast(g: &Graph) -> Toast {
        Toast::new(
            vec![Tile {
                id: 0,
                level: 1,
                vertices: (0..g.vertex_count()).collect(),
            }],
            ToastFlags::default(),
        )
    }

    #[test]
    fn init_examples() {
        let t = Graph::build_grid(&[4, 4], Topology::Torus).unwrap();
        let f = init_fractional(&t, 4).unwrap();
        assert!(f.edges().all(|(_, j)| j == 1));
        assert!(verify_fractional(&t, &f).pass());

        let c4 = cycle_graph(4);
        let f = init_fractional(&c4, 2).unwrap();
        assert!(f.edges().all(|(_, j)| j == 1));

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(init_fractional(&path, 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn circuit_on_four_cycle() {
        let g = cycle_graph(4);
        let f = FractionalMatching {
            d: 4,
            num: g.edges().into_iter().map(|e| (e, 1)).collect(),
        };
        let c = Cycle::new(&g, vec![0, 1, 2, 3, 0]).unwrap();
        let out = apply_circuit(&f, &c, (0, 1), 1).unwrap();
        assert_eq!(out.numerator((0, 1)), 2);
        assert_eq!(out.numerator((1, 2)), 0);
        assert_eq!(out.numerator((2, 3)), 2);
        assert_eq!(out.numerator((0, 3)), 0);
        // sums preserved (2 at every vertex here)
        let mut sums = [0usize; 4];
        for (e, j) in out.edges() {
            sums[e.0] += j;
            sums[e.1] += j;
        }
        assert!(sums.iter().all(|&s| s == 2));

        assert!(matches!(
            apply_circuit(&f, &c, (0, 1), 2),
            Err(Error::OutOfRange(_, _))
        ));
    }

    #[test]
    fn circuit_on_six_cycle() {
        let g = cycle_graph(6);
        let f = FractionalMatching {
            d: 4,
            num: g.edges().into_iter().map(|e| (e, 2)).collect(),
        };
        let c = Cycle::new(&g, vec![0, 1, 2, 3, 4, 5, 0]).unwrap();
        let out = apply_circuit(&f, &c, (0, 1), 2).unwrap();
        // sums checked at all six vertices
        let mut sums = [0usize; 6];
        for (e, j) in out.edges() {
            sums[e.0] += j;
            sums[e.1] += j;
        }
        assert!(sums.iter().all(|&s| s == 4));
        assert_eq!(out.numerator((0, 1)), 4);
        assert_eq!(out.numerator((1, 2)), 0);
    }

    #[test]
    fn circuit_parity_error() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let f = FractionalMatching {
            d: 2,
            num: g.edges().into_iter().map(|e| (e, 1)).collect(),
        };
        let c = Cycle::new(&g, vec![0, 1, 2, 0]).unwrap();
        assert!(matches!(
            apply_circuit(&f, &c, (0, 1), 1),
            Err(Error::ParityError(_))
        ));
    }

    #[test]
    fn round_whole_four_cycle() {
        let g = cycle_graph(4);
        let toast = whole_graph_toast(&g);
        let f = init_fractional(&g, 2).unwrap();
        let (out, log) = round_tile(&g, &f, &[0], &toast).unwrap();
        assert!(g.edges().into_iter().all(|e| out.is_integral(e)));
        assert!(!log.is_empty());
        let m = Matching {
            edges: out.saturated(),
        };
        assert!(verify_matching(&g, &m).pass());
    }

    #[test]
    fn chain_too_short_reports_stuck_edge() {
        // an 8-cycle with a single-edge tile: its own region has no cycle
        let g = cycle_graph(8);
        let toast = Toast::new(
            vec![Tile {
                id: 0,
                level: 1,
                vertices: VertexSet::from_vec(vec![0, 1]),
            }],
            ToastFlags::default(),
        );
        let f = init_fractional(&g, 2).unwrap();
        assert!(matches!(
            round_tile(&g, &f, &[0], &toast),
            Err(Error::ChainTooShort(0, 1))
        ));
    }

    #[test]
    fn perfect_matching_four_cycle() {
        let g = cycle_graph(4);
        let toast = whole_graph_toast(&g);
        let outcome = perfect_matching(&g, &toast, 2).unwrap();
        assert_eq!(outcome.matching.edges.len(), 2);
        assert!(verify_matching(&g, &outcome.matching).pass());
    }

    #[test]
    fn perfect_matching_generated_torus() {
        let g = Graph::build_grid(&[8, 8], Topology::Torus).unwrap();
        let ls = generate_level_sets(&g, 1, 1, 8, 5).unwrap();
        let toast = levels_to_toast(&g, &fill_levels(&g, &ls).unwrap());
        let outcome = perfect_matching(&g, &toast, 4).unwrap();
        assert_eq!(outcome.matching.edges.len(), 32);
        assert!(verify_matching(&g, &outcome.matching).pass());
        assert!(verify_fractional(&g, &outcome.fractional).pass());
    }

    #[test]
    fn two_level_toast_rounds_minimal_tile() {
        let g = Graph::build_grid(&[8, 8], Topology::Torus).unwrap();
        let ls = generate_level_sets(&g, 1, 1, 8, 5).unwrap();
        let mut toast = levels_to_toast(&g, &fill_levels(&g, &ls).unwrap());
        // carve a small block as an extra minimal tile
        let mut block = Vec::new();
        for x in 2..4 {
            for y in 2..4 {
                block.push(g.index_of(&[x, y]));
            }
        }
        toast.tiles.push(Tile {
            id: 1,
            level: 1,
            vertices: VertexSet::from_vec(block.clone()),
        });
        // not a valid toast (T1 over two same-level tiles is fine, but the
        // block is inside the whole-torus tile, so T2 still holds)
        let f = init_fractional(&g, 4).unwrap();
        let (out, _) = round_tile(&g, &f, &[1, 0], &toast).unwrap();
        let block_set = VertexSet::from_vec(block);
        for e in g.induced_edges(&block_set).iter() {
            assert!(out.is_integral(e));
        }
        assert!(verify_fractional(&g, &out).pass());
    }

    #[test]
    fn odd_graph_rejected() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let toast = whole_graph_toast(&g);
        assert!(matches!(
            perfect_matching(&g, &toast, 2),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn verify_matching_witnesses() {
        let g = cycle_graph(4);
        let m = Matching {
            edges: EdgeSet::from_vec(vec![(0, 1)]),
        };
        let rep = verify_matching(&g, &m);
        assert!(!rep.check("perfect").unwrap().pass);
        let overlapping = Matching {
            edges: EdgeSet::from_vec(vec![(0, 1), (1, 2)]),
        };
        assert!(!verify_matching(&g, &overlapping).check("disjoint").unwrap().pass);
    }

    #[test]
    fn fractional_json_shape() {
        let g = cycle_graph(4);
        let f = init_fractional(&g, 2).unwrap();
        let js = serde_json::to_value(&f).unwrap();
        assert_eq!(js["d"], 2);
        assert_eq!(js["num"][0], serde_json::json!([0, 1, 1]));
        let back: FractionalMatching = serde_json::from_value(js).unwrap();
        assert_eq!(back, f);
    }
}
