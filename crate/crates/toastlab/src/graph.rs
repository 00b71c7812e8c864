//! Finite graphs: lattice windows, lattice tori, and explicit adjacency,
//! plus the metric, boundary, and filling primitives everything else builds on.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Normalized undirected edge, `0 <= min < max`.
pub type Edge = (usize, usize);

/// Orders an endpoint pair.
pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Window,
    Torus,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    Outer,
    Visible,
}

/// Sorted, duplicate-free set of vertex ids. Serializes as a plain array.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> VertexSet {
        VertexSet(Vec::new())
    }

    pub fn from_vec(mut ids: Vec<usize>) -> VertexSet {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    pub fn from_mask(mask: &[bool]) -> VertexSet {
        VertexSet((0..mask.len()).filter(|&v| mask[v]).collect())
    }

    pub fn singleton(v: usize) -> VertexSet {
        VertexSet(vec![v])
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        VertexSet::from_vec(out)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> VertexSet {
        VertexSet::from_vec(iter.into_iter().collect())
    }
}

/// Sorted set of normalized edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSet(Vec<Edge>);

impl EdgeSet {
    pub fn new() -> EdgeSet {
        EdgeSet(Vec::new())
    }

    pub fn from_vec(pairs: Vec<(usize, usize)>) -> EdgeSet {
        let mut v: Vec<Edge> = pairs.into_iter().map(|(a, b)| edge(a, b)).collect();
        v.sort_unstable();
        v.dedup();
        EdgeSet(v)
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Edge] {
        &self.0
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> EdgeSet {
        EdgeSet::from_vec(iter.into_iter().collect())
    }
}

/// Finite undirected graph. Lattice graphs carry their dimensions and derive
/// coordinates from row-major vertex numbering; `window_exterior` is the rim
/// layer of a window (vertices of lattice degree `< 2d`).
#[derive(Clone, Debug)]
pub struct Graph {
    topology: Topology,
    dims: Vec<usize>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    window_exterior: VertexSet,
}

impl Graph {
    /// Lattice graph on `dims` with unit-vector adjacency. Torus sides must
    /// be at least 3 so that adjacency stays simple.
    pub fn build_grid(dims: &[usize], topology: Topology) -> Result<Graph> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("dims must be non-empty".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidParameter("zero dimension".into()));
        }
        match topology {
            Topology::Window => {}
            Topology::Torus => {
                if dims.iter().any(|&d| d < 3) {
                    return Err(Error::InvalidParameter(
                        "torus side lengths must be >= 3".into(),
                    ));
                }
            }
            Topology::Explicit => {
                return Err(Error::InvalidParameter(
                    "explicit topology requires an edge list".into(),
                ));
            }
        }
        let mut n: usize = 1;
        for &d in dims {
            n = n
                .checked_mul(d)
                .ok_or_else(|| Error::InvalidParameter("dimension overflow".into()))?;
        }
        let k = dims.len();
        let mut adj = vec![Vec::with_capacity(2 * k); n];
        let mut coord = vec![0usize; k];
        for v in 0..n {
            for axis in 0..k {
                let d = dims[axis];
                let c = coord[axis];
                let stride = dims[axis + 1..].iter().product::<usize>();
                if c + 1 < d {
                    adj[v].push(v + stride);
                } else if topology == Topology::Torus {
                    adj[v].push(v - c * stride);
                }
                if c > 0 {
                    adj[v].push(v - stride);
                } else if topology == Topology::Torus {
                    adj[v].push(v + (d - 1) * stride);
                }
            }
            // advance row-major coordinates (last axis fastest)
            for axis in (0..k).rev() {
                coord[axis] += 1;
                if coord[axis] < dims[axis] {
                    break;
                }
                coord[axis] = 0;
            }
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        let edge_count = adj.iter().map(|a| a.len()).sum::<usize>() / 2;
        let window_exterior = if topology == Topology::Window {
            let full_degree = 2 * k;
            VertexSet((0..n).filter(|&v| adj[v].len() < full_degree).collect())
        } else {
            VertexSet::new()
        };
        Ok(Graph {
            topology,
            dims: dims.to_vec(),
            adj,
            edge_count,
            window_exterior,
        })
    }

    /// Graph from an explicit edge list. Self-loops are rejected; duplicate
    /// edges collapse.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut set = EdgeSet::from_vec(edges.to_vec());
        for &(u, v) in set.as_slice() {
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            if v >= vertex_count {
                return Err(Error::InvalidParameter(format!(
                    "edge endpoint {v} out of range"
                )));
            }
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for (u, v) in std::mem::take(&mut set.0) {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        let edge_count = adj.iter().map(|a| a.len()).sum::<usize>() / 2;
        Ok(Graph {
            topology: Topology::Explicit,
            dims: Vec::new(),
            adj,
            edge_count,
            window_exterior: VertexSet::new(),
        })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && v < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges, lexicographically sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.adj.len() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Rim layer of a window; empty for other topologies.
    pub fn window_exterior(&self) -> &VertexSet {
        &self.window_exterior
    }

    /// Row-major coordinates of `v` on lattice graphs.
    pub fn coords(&self, v: usize) -> Option<Vec<usize>> {
        if self.dims.is_empty() {
            return None;
        }
        let mut rest = v;
        let mut out = vec![0usize; self.dims.len()];
        for axis in (0..self.dims.len()).rev() {
            out[axis] = rest % self.dims[axis];
            rest /= self.dims[axis];
        }
        Some(out)
    }

    /// Inverse of `coords`.
    pub fn index_of(&self, coords: &[usize]) -> usize {
        let mut v = 0usize;
        for (axis, &c) in coords.iter().enumerate() {
            v = v * self.dims[axis] + c;
        }
        v
    }

    /// Two-coloring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let n = self.vertex_count();
        let mut color = vec![u8::MAX; n];
        for start in 0..n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[u];
                        queue.push_back(w);
                    } else if color[w] == color[u] {
                        return None;
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c == 1).collect())
    }

    /// Multi-source BFS; `dist[v] == usize::MAX` means unreachable. Vertices
    /// with `allowed[v] == false` are never entered (sources must be allowed).
    pub(crate) fn bfs_masked(
        &self,
        sources: impl IntoIterator<Item = usize>,
        limit: usize,
        allowed: Option<&[bool]>,
    ) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for s in sources {
            if s < dist.len() && allowed.is_none_or(|m| m[s]) && dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            if dist[u] == limit {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX && allowed.is_none_or(|m| m[w]) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// `B_n(C)`: vertices at graph distance at most `n` from `C`.
    pub fn ball(&self, c: &VertexSet, n: usize) -> VertexSet {
        let dist = self.bfs_masked(c.iter(), n, None);
        VertexSet((0..self.vertex_count()).filter(|&v| dist[v] <= n).collect())
    }

    /// `B_n(C) - C`, or in visible mode the part of it from which a path
    /// avoiding `C` reaches the window rim.
    pub fn boundary(&self, c: &VertexSet, n: usize, mode: BoundaryMode) -> Result<VertexSet> {
        if n == 0 {
            return Err(Error::InvalidParameter("boundary radius must be >= 1".into()));
        }
        let outer = self.ball(c, n).difference(c);
        match mode {
            BoundaryMode::Outer => Ok(outer),
            BoundaryMode::Visible => {
                if self.topology != Topology::Window {
                    return Err(Error::UnsupportedTopology(
                        "visible boundary requires window topology".into(),
                    ));
                }
                let complement = complement_mask(self.vertex_count(), c);
                let reach = self.bfs_masked(
                    self.window_exterior.iter().filter(|&v| !c.contains(v)),
                    usize::MAX,
                    Some(&complement),
                );
                Ok(VertexSet(
                    outer.iter().filter(|&v| reach[v] != usize::MAX).collect(),
                ))
            }
        }
    }

    /// Partition of `B` into classes linked by hops of length `<= n` within `B`.
    pub fn n_components(&self, b: &VertexSet, n: usize) -> Result<Vec<VertexSet>> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "component linking distance must be >= 1".into(),
            ));
        }
        let mut class = vec![usize::MAX; self.vertex_count()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for start in b.iter() {
            if class[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            classes.push(Vec::new());
            let mut stack = vec![start];
            class[start] = id;
            while let Some(u) = stack.pop() {
                classes[id].push(u);
                let dist = self.bfs_masked([u], n, None);
                for v in b.iter() {
                    if class[v] == usize::MAX && dist[v] <= n {
                        class[v] = id;
                        stack.push(v);
                    }
                }
            }
        }
        Ok(classes.into_iter().map(VertexSet::from_vec).collect())
    }

    /// Connected components of the induced subgraph on `S`, ordered by least
    /// vertex id.
    pub fn connected_components(&self, s: &VertexSet) -> Vec<VertexSet> {
        let member = s.mask(self.vertex_count());
        let mut seen = vec![false; self.vertex_count()];
        let mut out = Vec::new();
        for start in s.iter() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &w in &self.adj[u] {
                    if member[w] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            out.push(VertexSet::from_vec(comp));
        }
        out
    }

    /// True when the complement of `C` induces a connected subgraph.
    pub fn is_full(&self, c: &VertexSet) -> Result<bool> {
        if self.topology == Topology::Explicit {
            return Err(Error::UnsupportedTopology(
                "fullness requires a lattice topology".into(),
            ));
        }
        if c.len() == self.vertex_count() {
            return Err(Error::DegenerateInput(
                "complement of the whole vertex set is empty".into(),
            ));
        }
        let complement: VertexSet = (0..self.vertex_count()).filter(|&v| !c.contains(v)).collect();
        Ok(self.connected_components(&complement).len() <= 1)
    }

    /// Union of `C` with the non-escaping components of its complement on a
    /// window. Exactly one complement component must meet the rim.
    pub fn fill(&self, c: &VertexSet) -> Result<VertexSet> {
        if self.topology != Topology::Window {
            return Err(Error::UnsupportedTopology(
                "filling requires window topology".into(),
            ));
        }
        self.fill_with_exterior_rule(c)
    }

    /// Filling usable on tori as well: the escaping component is the one
    /// meeting the rim (window) or the unique largest complement component
    /// (torus). Used by the level pipeline; the public `fill` keeps the
    /// window-only contract.
    pub(crate) fn fill_for_levels(&self, c: &VertexSet) -> Result<VertexSet> {
        match self.topology {
            Topology::Window => self.fill_with_exterior_rule(c),
            Topology::Torus => {
                if c.len() == self.vertex_count() {
                    return Ok(c.clone());
                }
                let complement: VertexSet =
                    (0..self.vertex_count()).filter(|&v| !c.contains(v)).collect();
                let comps = self.connected_components(&complement);
                let max_len = comps.iter().map(|k| k.len()).max().unwrap();
                let biggest: Vec<_> = comps.iter().filter(|k| k.len() == max_len).collect();
                if biggest.len() != 1 {
                    return Err(Error::NotFillable(
                        "no unique escaping complement component on torus".into(),
                    ));
                }
                let outside = biggest[0];
                let mut out = c.clone();
                for comp in &comps {
                    if comp != outside {
                        out = out.union(comp);
                    }
                }
                Ok(out)
            }
            Topology::Explicit => Err(Error::UnsupportedTopology(
                "filling requires a lattice topology".into(),
            )),
        }
    }

    fn fill_with_exterior_rule(&self, c: &VertexSet) -> Result<VertexSet> {
        let complement: VertexSet =
            (0..self.vertex_count()).filter(|&v| !c.contains(v)).collect();
        let comps = self.connected_components(&complement);
        let escaping: Vec<_> = comps
            .iter()
            .filter(|k| k.iter().any(|v| self.window_exterior.contains(v)))
            .collect();
        if escaping.len() != 1 {
            return Err(Error::NotFillable(format!(
                "{} complement components meet the window rim",
                escaping.len()
            )));
        }
        let escape = escaping[0].clone();
        let mut out = c.clone();
        for comp in comps {
            if comp != escape {
                out = out.union(&comp);
            }
        }
        Ok(out)
    }

    /// Edges of the induced subgraph on `S`.
    pub fn induced_edges(&self, s: &VertexSet) -> EdgeSet {
        let member = s.mask(self.vertex_count());
        let mut out = Vec::new();
        for u in s.iter() {
            for &v in &self.adj[u] {
                if u < v && member[v] {
                    out.push((u, v));
                }
            }
        }
        EdgeSet(out)
    }
}

fn complement_mask(n: usize, c: &VertexSet) -> Vec<bool> {
    let mut m = vec![true; n];
    for v in c.iter() {
        m[v] = false;
    }
    m
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<usize>>,
    topology: Topology,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertex_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(usize, usize)>>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match self.topology {
            Topology::Explicit => GraphJson {
                dims: None,
                topology: self.topology,
                vertex_count: Some(self.vertex_count()),
                edges: Some(self.edges()),
            },
            _ => GraphJson {
                dims: Some(self.dims.clone()),
                topology: self.topology,
                vertex_count: None,
                edges: None,
            },
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Graph, D::Error> {
        use serde::de::Error as DeError;
        let json = GraphJson::deserialize(d)?;
        match json.topology {
            Topology::Explicit => {
                let edges = json.edges.unwrap_or_default();
                let n = json.vertex_count.unwrap_or_else(|| {
                    edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0)
                });
                Graph::from_edges(n, &edges).map_err(D::Error::custom)
            }
            topo => {
                let dims = json
                    .dims
                    .ok_or_else(|| D::Error::custom("lattice graph requires dims"))?;
                Graph::build_grid(&dims, topo).map_err(D::Error::custom)
            }
        }
    }
}
