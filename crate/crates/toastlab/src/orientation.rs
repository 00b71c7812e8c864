//! Parity spanning subgraphs, cycle extraction in even-degree edge sets, and
//! the toast-driven balanced orientation: peel edge-disjoint cycles level by
//! level, orienting each cyclically, until every edge is directed with equal
//! in- and out-degree at every vertex.

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, EdgeSet, Graph, VertexSet};
use crate::report::Report;
use crate::toast::{layer_index, strictly_inside, verify_toast, Toast};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Total or partial edge orientation; keys are normalized edges, values the
/// chosen (tail, head).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Orientation {
    arcs: BTreeMap<Edge, (usize, usize)>,
}

impl Orientation {
    pub fn orient(&mut self, tail: usize, head: usize) -> Result<()> {
        let e = edge(tail, head);
        if self.arcs.insert(e, (tail, head)).is_some() {
            return Err(Error::InvalidInput(format!(
                "edge ({}, {}) oriented twice",
                e.0, e.1
            )));
        }
        Ok(())
    }

    pub fn get(&self, e: Edge) -> Option<(usize, usize)> {
        self.arcs.get(&e).copied()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.values().copied()
    }
}

#[derive(Serialize, Deserialize)]
struct Arc {
    tail: usize,
    head: usize,
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let arcs: Vec<Arc> = self
            .arcs
            .values()
            .map(|&(tail, head)| Arc { tail, head })
            .collect();
        arcs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Orientation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let arcs = Vec::<Arc>::deserialize(d)?;
        let mut out = Orientation::default();
        for a in arcs {
            out.orient(a.tail, a.head)
                .map_err(|e| D::Error::custom(e.to_string()))?;
        }
        Ok(out)
    }
}

/// Closed walk with pairwise-distinct edges. Vertices may repeat; the first
/// and last entries coincide.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cycle {
    vertices: Vec<usize>,
}

impl Cycle {
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Cycle> {
        if vertices.len() < 4 || vertices.first() != vertices.last() {
            return Err(Error::InvalidParameter(
                "cycle needs a closed vertex sequence".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for w in vertices.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "({}, {}) is not an edge",
                    w[0], w[1]
                )));
            }
            if !seen.insert(edge(w[0], w[1])) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) repeats",
                    w[0], w[1]
                )));
            }
        }
        Ok(Cycle { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Walk edges in order, unnormalized.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.steps().any(|(a, b)| edge(a, b) == e)
    }
}

/// Spanning subgraph with odd degree exactly on `P`: spanning tree, greedy
/// pairing of `P`, symmetric difference of tree paths.
pub fn parity_subgraph(g: &Graph, p: &VertexSet) -> Result<EdgeSet> {
    if !p.len().is_multiple_of(2) {
        return Err(Error::NoSolution("odd parity set".into()));
    }
    let all: VertexSet = (0..g.vertex_count()).collect();
    let mut toggles: BTreeMap<Edge, bool> = BTreeMap::new();
    for comp in g.connected_components(&all) {
        let members: Vec<usize> = p.iter().filter(|&v| comp.contains(v)).collect();
        if !members.len().is_multiple_of(2) {
            return Err(Error::NoSolution(
                "parity set splits oddly across components".into(),
            ));
        }
        if members.is_empty() {
            continue;
        }
        // breadth-first spanning tree from the least vertex
        let root = comp.first().unwrap();
        let mask = comp.mask(g.vertex_count());
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([root]);
        let mut seen = vec![false; g.vertex_count()];
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if mask[w] && !seen[w] {
                    seen[w] = true;
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
        fn depth_of(v: usize, parent: &BTreeMap<usize, usize>, memo: &mut BTreeMap<usize, usize>) -> usize {
            if let Some(&d) = memo.get(&v) {
                return d;
            }
            let d = match parent.get(&v) {
                Some(&p) => depth_of(p, parent, memo) + 1,
                None => 0,
            };
            memo.insert(v, d);
            d
        }
        for pair in members.chunks(2) {
            let (mut a, mut b) = (pair[0], pair[1]);
            let mut da = depth_of(a, &parent, &mut depth);
            let mut db = depth_of(b, &parent, &mut depth);
            while da > db {
                let pa = parent[&a];
                *toggles.entry(edge(a, pa)).or_default() ^= true;
                a = pa;
                da -= 1;
            }
            while db > da {
                let pb = parent[&b];
                *toggles.entry(edge(b, pb)).or_default() ^= true;
                b = pb;
                db -= 1;
            }
            while a != b {
                let (pa, pb) = (parent[&a], parent[&b]);
                *toggles.entry(edge(a, pa)).or_default() ^= true;
                *toggles.entry(edge(b, pb)).or_default() ^= true;
                a = pa;
                b = pb;
            }
        }
    }
    let out: EdgeSet = toggles
        .into_iter()
        .filter(|&(_, on)| on)
        .map(|(e, _)| e)
        .collect();
    #[cfg(debug_assertions)]
    {
        let mut deg = vec![0usize; g.vertex_count()];
        for (a, b) in out.iter() {
            deg[a] += 1;
            deg[b] += 1;
        }
        for v in 0..g.vertex_count() {
            debug_assert_eq!(deg[v] % 2 == 1, p.contains(v), "parity at {v}");
        }
    }
    Ok(out)
}

/// Edge-distinct closed walk through `e` inside `region`, using only
/// `available` edges. Every vertex of the available subgraph restricted to
/// the region must have even degree; the walk extends by the least unused
/// neighbor and must close up at the start.
pub fn extract_cycle(
    g: &Graph,
    available: &EdgeSet,
    e: Edge,
    region: &VertexSet,
) -> Result<Cycle> {
    let e = edge(e.0, e.1);
    if !available.contains(e) {
        return Err(Error::NoCycle(format!(
            "edge ({}, {}) is not available",
            e.0, e.1
        )));
    }
    if !region.contains(e.0) || !region.contains(e.1) {
        return Err(Error::NoCycle("edge leaves the region".into()));
    }
    let in_region = |a: usize, b: usize| region.contains(a) && region.contains(b);
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for (a, b) in available.iter() {
        if in_region(a, b) {
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
    }
    if degree.values().any(|&d| d % 2 != 0) {
        return Err(Error::NoCycle(
            "available subgraph has odd degrees in the region".into(),
        ));
    }
    let (start, mut cur) = (e.0, e.1);
    let mut used = BTreeSet::from([e]);
    let mut walk = vec![start, cur];
    while cur != start {
        let next = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&w| {
                let f = edge(cur, w);
                in_region(cur, w) && available.contains(f) && !used.contains(&f)
            })
            .ok_or_else(|| Error::NoCycle(format!("walk stuck at {cur}")))?;
        used.insert(edge(cur, next));
        walk.push(next);
        cur = next;
    }
    Cycle::new(g, walk)
}

/// One peeled cycle in the run log of `balanced_orientation`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycleRecord {
    pub layer: usize,
    pub tile: usize,
    /// 0 = the tile itself, k = its k-th strict ancestor, `fallback` when the
    /// search widened to the whole remaining component.
    pub region: usize,
    pub fallback: bool,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrientationRun {
    pub orientation: Orientation,
    pub cycles: Vec<CycleRecord>,
}

/// Orients every edge of an even-degree graph with in-degree equal to
/// out-degree everywhere, by peeling cycles through surviving edges of each
/// toast layer inside the smallest ancestor tile that closes them.
pub fn balanced_orientation(g: &Graph, toast: &Toast) -> Result<OrientationRun> {
    for v in 0..g.vertex_count() {
        if !g.degree(v).is_multiple_of(2) {
            return Err(Error::NotEvenDegree(v));
        }
    }
    toast.validate(g)?;
    let report = verify_toast(g, toast);
    for name in ["T1", "T2", "T3"] {
        if !report.check(name).is_some_and(|c| c.pass) {
            return Err(Error::InvalidToast(format!("verification fails {name}")));
        }
    }
    let layer_of = layer_index(toast)?;
    let order: Vec<usize> = {
        let mut idx: Vec<usize> = (0..toast.tiles.len()).collect();
        idx.sort_by_key(|&i| (layer_of[i], toast.tiles[i].id));
        idx
    };

    let edges = g.edges();
    let edge_id: BTreeMap<Edge, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut remaining = vec![true; edges.len()];
    let mut orientation = Orientation::default();
    let mut cycles = Vec::new();
    let all: VertexSet = (0..g.vertex_count()).collect();

    for &i in &order {
        let tile = &toast.tiles[i];
        let mut ancestors: Vec<&crate::toast::Tile> = toast
            .tiles
            .iter()
            .filter(|t| strictly_inside(tile, t))
            .collect();
        ancestors.sort_by_key(|t| (t.vertices.len(), t.level, t.id));
        let mut regions: Vec<&VertexSet> = vec![&tile.vertices];
        regions.extend(ancestors.iter().map(|t| &t.vertices));

        let tile_edges: Vec<Edge> = g.induced_edges(&tile.vertices).iter().collect();
        for e in tile_edges {
            if !remaining[edge_id[&e]] {
                continue;
            }
            let mut found = None;
            for (ridx, region) in regions.iter().enumerate() {
                if let Some(path) = bfs_path(g, e, region, &remaining, &edge_id) {
                    found = Some((ridx, false, path));
                    break;
                }
            }
            if found.is_none() {
                if let Some(path) = bfs_path(g, e, &all, &remaining, &edge_id) {
                    found = Some((regions.len(), true, path));
                }
            }
            let (ridx, fallback, path) =
                found.ok_or_else(|| Error::NoCycle(format!("edge ({}, {})", e.0, e.1)))?;
            // path runs a -> b without e; close it with e
            let mut walk = path;
            walk.push(walk[0]);
            let cycle = Cycle::new(g, walk)?;
            for (tail, head) in cycle.steps() {
                let f = edge(tail, head);
                debug_assert!(remaining[edge_id[&f]]);
                remaining[edge_id[&f]] = false;
                orientation.orient(tail, head)?;
            }
            cycles.push(CycleRecord {
                layer: layer_of[i],
                tile: tile.id,
                region: ridx,
                fallback,
                vertices: cycle.vertices().to_vec(),
            });
        }
        #[cfg(debug_assertions)]
        {
            let mut net = vec![0i64; g.vertex_count()];
            for (tail, head) in orientation.arcs() {
                net[tail] += 1;
                net[head] -= 1;
            }
            debug_assert!(net.iter().all(|&x| x == 0), "partial orientation unbalanced");
        }
    }
    if remaining.iter().any(|&r| r) {
        return Err(Error::InvalidToast(
            "uncovered edges remain after all layers".into(),
        ));
    }
    Ok(OrientationRun {
        orientation,
        cycles,
    })
}

/// Shortest path from `e.0` to `e.1` avoiding `e`, through remaining edges
/// inside `region`. Returns the vertex sequence.
fn bfs_path(
    g: &Graph,
    e: Edge,
    region: &VertexSet,
    remaining: &[bool],
    edge_id: &BTreeMap<Edge, usize>,
) -> Option<Vec<usize>> {
    if !region.contains(e.0) || !region.contains(e.1) {
        return None;
    }
    let (from, to) = (e.1, e.0);
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in g.neighbors(v) {
            let f = edge(v, w);
            if f == e || !region.contains(w) || !remaining[edge_id[&f]] {
                continue;
            }
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(w) {
                e.insert(v);
                queue.push_back(w);
            }
        }
    }
    if !prev.contains_key(&to) {
        return None;
    }
    // walk to (= e.0) ... from (= e.1); closing it afterwards traverses e
    // from e.1 back to e.0
    let mut walk = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[&cur];
        walk.push(cur);
    }
    Some(walk)
}

/// Every edge oriented exactly once; in-degree equals out-degree everywhere.
pub fn verify_balanced(g: &Graph, o: &Orientation) -> Report {
    let mut report = Report::new();
    let edges = g.edges();
    let mut missing = None;
    for &e in &edges {
        if o.get(e).is_none() {
            missing = Some(e);
            break;
        }
    }
    let mut alien = None;
    for (tail, head) in o.arcs() {
        if !g.has_edge(tail, head) {
            alien = Some((tail, head));
            break;
        }
    }
    report.push(
        "covered",
        missing.is_none() && alien.is_none() && o.len() == edges.len(),
        Some(json!({
            "uncovered_edge": missing,
            "not_an_edge": alien,
            "oriented": o.len(),
            "edges": edges.len(),
        })),
    );

    let mut indeg = vec![0usize; g.vertex_count()];
    let mut outdeg = vec![0usize; g.vertex_count()];
    for (tail, head) in o.arcs() {
        if tail < g.vertex_count() && head < g.vertex_count() {
            outdeg[tail] += 1;
            indeg[head] += 1;
        }
    }
    let witnesses: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| indeg[v] != outdeg[v])
        .collect();
    report.push(
        "balanced",
        witnesses.is_empty(),
        Some(json!({
            "unbalanced": witnesses.iter().take(4).collect::<Vec<_>>(),
            "count": witnesses.len(),
        })),
    );
    report
}

/// Graphviz export with one arrowhead per oriented edge.
pub fn orientation_dot(g: &Graph, o: &Orientation) -> String {
    let mut out = String::from("digraph orientation {\n  node [shape=point];\n");
    let mut vertices: Vec<usize> = o.arcs().flat_map(|(a, b)| [a, b]).collect();
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
    for (tail, head) in o.arcs() {
        out.push_str(&format!("  v{tail} -> v{head};\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Topology;
    use crate::levels::{fill_levels, generate_level_sets, levels_to_toast};
    use crate::toast::{Tile, Toast, ToastFlags};

    fn cycle_graph(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn parity_on_path() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let h = parity_subgraph(&g, &VertexSet::from_vec(vec![0, 2])).unwrap();
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn parity_on_triangle() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let h = parity_subgraph(&g, &VertexSet::from_vec(vec![0, 1])).unwrap();
        let mut deg = [0usize; 3];
        for (a, b) in h.iter() {
            deg[a] += 1;
            deg[b] += 1;
        }
        assert_eq!([deg[0] % 2, deg[1] % 2, deg[2] % 2], [1, 1, 0]);
    }

    #[test]
    fn parity_on_four_cycle_all_odd() {
        let g = cycle_graph(4);
        let p: VertexSet = (0..4).collect();
        let h = parity_subgraph(&g, &p).unwrap();
        let mut deg = [0usize; 4];
        for (a, b) in h.iter() {
            deg[a] += 1;
            deg[b] += 1;
        }
        assert!(deg.iter().all(|d| d % 2 == 1));

        // exhaustive subset search confirms a solution exists
        let edges = g.edges();
        let mut found = false;
        for mask in 0u32..(1 << edges.len()) {
            let mut deg = [0usize; 4];
            for (i, (a, b)) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    deg[*a] += 1;
                    deg[*b] += 1;
                }
            }
            if deg.iter().all(|d| d % 2 == 1) {
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn parity_errors() {
        let g = cycle_graph(4);
        assert!(matches!(
            parity_subgraph(&g, &VertexSet::from_vec(vec![0])),
            Err(Error::NoSolution(_))
        ));
        let split = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            parity_subgraph(&split, &VertexSet::from_vec(vec![0, 2])),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn extract_cycle_examples() {
        let g = cycle_graph(4);
        let all: EdgeSet = g.edges().into_iter().collect();
        let region: VertexSet = (0..4).collect();
        let c = extract_cycle(&g, &all, (0, 1), &region).unwrap();
        assert_eq!(c.edge_count(), 4);

        // two triangles sharing vertex 0: the walk from an edge of the first
        // stays in the first
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        let all: EdgeSet = g.edges().into_iter().collect();
        let region: VertexSet = (0..5).collect();
        let c = extract_cycle(&g, &all, (0, 1), &region).unwrap();
        assert_eq!(c.edge_count(), 3);
        assert!(c.contains_edge(edge(0, 1)));
        assert!(c.contains_edge(edge(1, 2)));
        assert!(c.contains_edge(edge(0, 2)));

        let missing: EdgeSet = g.edges().into_iter().filter(|&e| e != (0, 1)).collect();
        assert!(matches!(
            extract_cycle(&g, &missing, (0, 1), &region),
            Err(Error::NoCycle(_))
        ));
    }

    #[test]
    fn cycle_deletion_preserves_even_degrees() {
        let g = Graph::build_grid(&[4, 4], Topology::Torus).unwrap();
        let mut available: EdgeSet = g.edges().into_iter().collect();
        let region: VertexSet = (0..g.vertex_count()).collect();
        while let Some(&e) = available.as_slice().first() {
            let c = extract_cycle(&g, &available, e, &region).unwrap();
            let removed: Vec<Edge> = c.steps().map(|(a, b)| edge(a, b)).collect();
            available = available.iter().filter(|e| !removed.contains(e)).collect();
            let mut deg = vec![0usize; g.vertex_count()];
            for (a, b) in available.iter() {
                deg[a] += 1;
                deg[b] += 1;
            }
            assert!(deg.iter().all(|d| d % 2 == 0));
        }
    }

    #[test]
    fn orient_single_cycle() {
        let g = cycle_graph(6);
        let toast = Toast::new(
            vec![Tile {
                id: 0,
                level: 1,
                vertices: (0..6).collect(),
            }],
            ToastFlags::default(),
        );
        let run = balanced_orientation(&g, &toast).unwrap();
        assert!(verify_balanced(&g, &run.orientation).pass());
        assert_eq!(run.cycles.len(), 1);
    }

    #[test]
    fn orient_generated_torus() {
        let g = Graph::build_grid(&[8, 8], Topology::Torus).unwrap();
        let ls = generate_level_sets(&g, 1, 1, 8, 5).unwrap();
        let toast = levels_to_toast(&g, &fill_levels(&g, &ls).unwrap());
        let run = balanced_orientation(&g, &toast).unwrap();
        let rep = verify_balanced(&g, &run.orientation);
        assert!(rep.pass(), "{:?}", rep);
        // 4-regular balance means in-degree 2 everywhere
        let mut indeg = vec![0usize; g.vertex_count()];
        for (_, head) in run.orientation.arcs() {
            indeg[head] += 1;
        }
        assert!(indeg.iter().all(|&d| d == 2));
        // peeled cycles partition the edge set
        let total: usize = run.cycles.iter().map(|c| c.vertices.len() - 1).sum();
        assert_eq!(total, g.edge_count());
    }

    #[test]
    fn odd_degree_rejected() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let toast = Toast::new(
            vec![Tile {
                id: 0,
                level: 1,
                vertices: (0..4).collect(),
            }],
            ToastFlags::default(),
        );
        assert!(matches!(
            balanced_orientation(&g, &toast),
            Err(Error::NotEvenDegree(_))
        ));
    }

    #[test]
    fn verify_balanced_witnesses() {
        let g = cycle_graph(4);
        let mut o = Orientation::default();
        o.orient(0, 1).unwrap();
        o.orient(1, 2).unwrap();
        o.orient(2, 3).unwrap();
        o.orient(3, 0).unwrap();
        assert!(verify_balanced(&g, &o).pass());

        // flip one arc: two unbalanced vertices
        let mut flipped = Orientation::default();
        flipped.orient(0, 1).unwrap();
        flipped.orient(2, 1).unwrap();
        flipped.orient(2, 3).unwrap();
        flipped.orient(3, 0).unwrap();
        let rep = verify_balanced(&g, &flipped);
        assert!(!rep.check("balanced").unwrap().pass);
        let w = rep.check("balanced").unwrap().witness.as_ref().unwrap();
        assert_eq!(w["count"], 2);

        let mut partial = Orientation::default();
        partial.orient(0, 1).unwrap();
        let rep = verify_balanced(&g, &partial);
        assert!(!rep.check("covered").unwrap().pass);
    }

    #[test]
    fn eulerian_partition_after_balance() {
        let g = Graph::build_grid(&[6, 6], Topology::Torus).unwrap();
        let ls = generate_level_sets(&g, 1, 1, 6, 2).unwrap();
        let toast = levels_to_toast(&g, &fill_levels(&g, &ls).unwrap());
        let run = balanced_orientation(&g, &toast).unwrap();
        // follow out-arcs greedily: balance forces a decomposition into
        // directed cycles
        let mut unused: BTreeSet<(usize, usize)> = run.orientation.arcs().collect();
        while let Some(&(tail, head)) = unused.iter().next() {
            unused.remove(&(tail, head));
            let start = tail;
            let mut cur = head;
            while cur != start {
                let next = unused
                    .iter()
                    .find(|&&(t, _)| t == cur)
                    .copied()
                    .expect("stuck mid-walk: orientation not balanced");
                unused.remove(&next);
                cur = next.1;
            }
        }
    }
}
