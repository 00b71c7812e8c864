//! Toast data structure and its axioms: exhaustive edge coverage (T1), the
//! separation/nesting trichotomy (T2), connected residuals (T3), and layered
//! nesting (T4), plus the greedy kernel that extracts a connected partial
//! toast from one that merely satisfies T1 and T2.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::ratio::Ratio;
use crate::report::Report;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tile {
    pub id: usize,
    pub level: usize,
    pub vertices: VertexSet,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ToastFlags {
    pub claims_connected: bool,
    pub claims_layered: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Toast {
    pub tiles: Vec<Tile>,
    pub flags: ToastFlags,
}

impl Toast {
    pub fn new(tiles: Vec<Tile>, flags: ToastFlags) -> Toast {
        Toast { tiles, flags }
    }

    pub fn tile(&self, id: usize) -> Option<&Tile> {
        self.tiles.iter().find(|t| t.id == id)
    }

    /// Union of all tile vertex sets.
    pub fn support(&self) -> VertexSet {
        let mut out = VertexSet::new();
        for t in &self.tiles {
            out = out.union(&t.vertices);
        }
        out
    }

    /// Basic well-formedness: unique ids, vertices in range, non-empty tiles.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut ids: Vec<usize> = self.tiles.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.tiles.len() {
            return Err(Error::InvalidToast("duplicate tile ids".into()));
        }
        for t in &self.tiles {
            if t.vertices.is_empty() {
                return Err(Error::InvalidToast(format!("tile {} is empty", t.id)));
            }
            if t.level == 0 {
                return Err(Error::InvalidToast(format!("tile {} has level 0", t.id)));
            }
            if t.vertices.iter().any(|v| v >= g.vertex_count()) {
                return Err(Error::InvalidToast(format!(
                    "tile {} has out-of-range vertices",
                    t.id
                )));
            }
        }
        Ok(())
    }
}

/// `a` counts as strictly inside `b`. Identical vertex sets are ordered by
/// (level, id) so that duplicate tiles still stratify deterministically.
pub(crate) fn strictly_inside(a: &Tile, b: &Tile) -> bool {
    if a.id == b.id || !a.vertices.is_subset(&b.vertices) {
        return false;
    }
    if a.vertices.len() < b.vertices.len() {
        return true;
    }
    (a.level, a.id) < (b.level, b.id)
}

/// Stratification into layers by iterated minimality under containment.
/// Requires laminarity: no two tiles may properly overlap.
pub fn layers(toast: &Toast) -> Result<Vec<Vec<usize>>> {
    for (i, a) in toast.tiles.iter().enumerate() {
        for b in &toast.tiles[i + 1..] {
            let ab = a.vertices.intersection(&b.vertices);
            if !ab.is_empty() && ab != a.vertices && ab != b.vertices {
                return Err(Error::InvalidToast(format!(
                    "tiles {} and {} properly overlap",
                    a.id, b.id
                )));
            }
        }
    }
    let mut remaining: Vec<&Tile> = toast.tiles.iter().collect();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let minimal: Vec<usize> = remaining
            .iter()
            .filter(|t| !remaining.iter().any(|s| strictly_inside(s, t)))
            .map(|t| t.id)
            .collect();
        if minimal.is_empty() {
            return Err(Error::InvalidToast("containment order has no minimal tile".into()));
        }
        let mut layer = minimal;
        layer.sort_unstable();
        remaining.retain(|t| !layer.contains(&t.id));
        out.push(layer);
    }
    Ok(out)
}

/// Layer index (1-based) of every tile, keyed by tile id order in the toast.
pub(crate) fn layer_index(toast: &Toast) -> Result<Vec<usize>> {
    let strata = layers(toast)?;
    let mut idx = vec![0usize; toast.tiles.len()];
    for (k, layer) in strata.iter().enumerate() {
        for id in layer {
            let pos = toast.tiles.iter().position(|t| t.id == *id).unwrap();
            idx[pos] = k + 1;
        }
    }
    Ok(idx)
}

/// Tile vertices minus all strictly contained tiles.
pub fn residual(toast: &Toast, tile_id: usize) -> Result<VertexSet> {
    let tile = toast
        .tile(tile_id)
        .ok_or_else(|| Error::NotFound(format!("tile {tile_id}")))?;
    let mut out = tile.vertices.clone();
    for other in &toast.tiles {
        if strictly_inside(other, tile) {
            out = out.difference(&other.vertices);
        }
    }
    Ok(out)
}

/// Checks T1 through T4 and reports witnesses. T1 is checked against the
/// edges induced on the union of tiles for window graphs; edges with an
/// endpoint outside every tile are counted separately there instead of
/// failing the check.
pub fn verify_toast(g: &Graph, toast: &Toast) -> Report {
    let mut report = Report::new();
    let n = g.vertex_count();
    let support = toast.support();
    let support_mask = support.mask(n);

    // T1: every edge lies in some tile's induced subgraph.
    let mut covered = vec![false; g.edge_count()];
    let edge_index: std::collections::BTreeMap<_, _> = g
        .edges()
        .into_iter()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    for tile in &toast.tiles {
        for e in g.induced_edges(&tile.vertices).iter() {
            covered[edge_index[&e]] = true;
        }
    }
    let mut failing = Vec::new();
    let mut rim_edges = 0usize;
    for (e, &i) in &edge_index {
        if covered[i] {
            continue;
        }
        let interior = support_mask[e.0] && support_mask[e.1];
        if interior || g.topology() != crate::graph::Topology::Window {
            failing.push(*e);
        } else {
            rim_edges += 1;
        }
    }
    report.push(
        "T1",
        failing.is_empty(),
        Some(json!({
            "uncovered": failing.iter().take(4).collect::<Vec<_>>(),
            "uncovered_count": failing.len(),
            "rim_edges": rim_edges,
        })),
    );

    // T2: pairwise trichotomy via 1-balls.
    let balls: Vec<VertexSet> = toast
        .tiles
        .par_iter()
        .map(|t| g.ball(&t.vertices, 1))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..toast.tiles.len())
        .flat_map(|i| ((i + 1)..toast.tiles.len()).map(move |j| (i, j)))
        .collect();
    let mut t2_witnesses: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|&&(i, j)| {
            let (k, l) = (&toast.tiles[i], &toast.tiles[j]);
            let ok = balls[i].is_disjoint(&l.vertices)
                || balls[i].is_subset(&l.vertices)
                || balls[j].is_subset(&k.vertices);
            !ok
        })
        .map(|&(i, j)| (toast.tiles[i].id, toast.tiles[j].id))
        .collect();
    t2_witnesses.sort_unstable();
    report.push(
        "T2",
        t2_witnesses.is_empty(),
        Some(json!({
            "violating_pairs": t2_witnesses.iter().take(4).collect::<Vec<_>>(),
            "violation_count": t2_witnesses.len(),
        })),
    );

    // T3: connected non-empty residuals. An empty residual (duplicate tiles)
    // counts as a violation.
    let mut t3_witnesses = Vec::new();
    for tile in &toast.tiles {
        let res = residual(toast, tile.id).unwrap();
        if res.is_empty() || g.connected_components(&res).len() != 1 {
            t3_witnesses.push(tile.id);
        }
    }
    report.push(
        "T3",
        t3_witnesses.is_empty(),
        Some(json!({
            "disconnected_residuals": t3_witnesses.iter().take(4).collect::<Vec<_>>(),
            "violation_count": t3_witnesses.len(),
        })),
    );

    // T4: layer unions nest upward.
    match layers(toast) {
        Ok(strata) => {
            let unions: Vec<VertexSet> = strata
                .iter()
                .map(|layer| {
                    layer
                        .iter()
                        .flat_map(|id| toast.tile(*id).unwrap().vertices.iter())
                        .collect()
                })
                .collect();
            let mut witness = None;
            for i in 0..unions.len().saturating_sub(1) {
                if !unions[i].is_subset(&unions[i + 1]) {
                    let v = unions[i].difference(&unions[i + 1]).first();
                    witness = Some(json!({"layer": i + 1, "vertex": v}));
                    break;
                }
            }
            report.push("T4", witness.is_none(), witness);
        }
        Err(e) => {
            report.push("T4", false, Some(json!({"error": e.to_string()})));
        }
    }
    report
}

/// Greedy multi-pass selection of covered tiles (the combinatorial kernel
/// behind turning an arbitrary toast into a connected partial toast). The
/// output satisfies T2 and T3; the second value is the fraction of the
/// vertex set covered by the selected tiles.
pub fn refine_to_connected(g: &Graph, toast: &Toast) -> Result<(Toast, Ratio)> {
    toast.validate(g)?;
    let full = verify_toast(g, toast);
    let t2 = full.check("T2").is_some_and(|c| c.pass);
    if !t2 {
        return Err(Error::InvalidToast("input violates the trichotomy".into()));
    }
    let coverage_of = |t: &Toast| -> Ratio {
        Ratio::new(t.support().len() as u64, g.vertex_count() as u64)
    };
    if full.check("T3").is_some_and(|c| c.pass) {
        return Ok((toast.clone(), coverage_of(toast)));
    }

    let layer_of = layer_index(toast)?;
    let n = toast.tiles.len();
    let balls: Vec<VertexSet> = toast.tiles.iter().map(|t| g.ball(&t.vertices, 1)).collect();
    let mut selected = vec![false; n];
    let mut selected_union = VertexSet::new();
    let mut floor = 1usize;

    loop {
        let avail: Vec<usize> = (0..n)
            .filter(|&i| !selected[i] && layer_of[i] >= floor)
            .collect();
        if avail.is_empty() {
            break;
        }
        // A tile is a candidate when its residual against the current
        // selection is connected and some strictly larger available tile
        // contains its 1-ball and keeps a connected remainder.
        let mut candidate_cover: Vec<Option<usize>> = vec![None; n];
        for &i in &avail {
            let resid = toast.tiles[i].vertices.difference(&selected_union);
            if resid.is_empty() || g.connected_components(&resid).len() != 1 {
                continue;
            }
            for &j in &avail {
                if j == i || !balls[i].is_subset(&toast.tiles[j].vertices) {
                    continue;
                }
                if !strictly_inside(&toast.tiles[i], &toast.tiles[j]) {
                    continue;
                }
                let room = toast.tiles[j]
                    .vertices
                    .difference(&toast.tiles[i].vertices)
                    .difference(&selected_union);
                if !room.is_empty() && g.connected_components(&room).len() == 1 {
                    candidate_cover[i] = Some(layer_of[j]);
                    break;
                }
            }
        }
        let candidates: Vec<usize> = avail
            .iter()
            .copied()
            .filter(|&i| candidate_cover[i].is_some())
            .collect();
        if candidates.is_empty() {
            break;
        }
        // One covered tile per maximal region below the cover level.
        let min_layer = candidates.iter().map(|&i| layer_of[i]).min().unwrap();
        let cover_layer = candidates
            .iter()
            .filter(|&&i| layer_of[i] == min_layer)
            .map(|&i| candidate_cover[i].unwrap())
            .min()
            .unwrap();
        let below: Vec<usize> = avail
            .iter()
            .copied()
            .filter(|&i| layer_of[i] < cover_layer)
            .collect();
        let regions: Vec<usize> = below
            .iter()
            .copied()
            .filter(|&i| {
                !below
                    .iter()
                    .any(|&j| strictly_inside(&toast.tiles[i], &toast.tiles[j]))
            })
            .collect();
        let mut newly = Vec::new();
        for &region in &regions {
            let pick = candidates
                .iter()
                .copied()
                .filter(|&i| {
                    i == region
                        || strictly_inside(&toast.tiles[i], &toast.tiles[region])
                })
                .min_by_key(|&i| (layer_of[i], toast.tiles[i].id));
            if let Some(i) = pick {
                if !newly.contains(&i) {
                    newly.push(i);
                }
            }
        }
        if newly.is_empty() {
            break;
        }
        let mut max_layer = floor;
        for i in newly {
            selected[i] = true;
            selected_union = selected_union.union(&toast.tiles[i].vertices);
            max_layer = max_layer.max(layer_of[i]);
        }
        floor = max_layer + 1;
    }

    let tiles: Vec<Tile> = toast
        .tiles
        .iter()
        .enumerate()
        .filter(|(i, _)| selected[*i])
        .map(|(_, t)| t.clone())
        .collect();
    let out = Toast::new(
        tiles,
        ToastFlags {
            claims_connected: true,
            claims_layered: false,
        },
    );
    let coverage = coverage_of(&out);
    Ok((out, coverage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Topology;

    fn tile(id: usize, level: usize, vs: Vec<usize>) -> Tile {
        Tile {
            id,
            level,
            vertices: VertexSet::from_vec(vs),
        }
    }

    fn boxy(g: &Graph, x0: usize, y0: usize, w: usize, h: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for x in x0..x0 + w {
            for y in y0..y0 + h {
                out.push(g.index_of(&[x, y]));
            }
        }
        out
    }

    #[test]
    fn layers_examples() {
        let a = tile(0, 1, vec![0]);
        let b = tile(1, 1, vec![5]);
        let t = Toast::new(vec![a.clone(), b.clone()], ToastFlags::default());
        assert_eq!(layers(&t).unwrap(), vec![vec![0, 1]]);

        // chain K ⊂ L ⊂ M
        let t = Toast::new(
            vec![
                tile(0, 1, vec![0]),
                tile(1, 2, vec![0, 1, 2]),
                tile(2, 3, vec![0, 1, 2, 3, 4]),
            ],
            ToastFlags::default(),
        );
        assert_eq!(layers(&t).unwrap(), vec![vec![0], vec![1], vec![2]]);

        // K, K' disjoint inside L
        let t = Toast::new(
            vec![
                tile(0, 1, vec![0]),
                tile(1, 1, vec![4]),
                tile(2, 2, vec![0, 1, 2, 3, 4]),
            ],
            ToastFlags::default(),
        );
        assert_eq!(layers(&t).unwrap(), vec![vec![0, 1], vec![2]]);

        // proper overlap breaks stratification
        let t = Toast::new(
            vec![tile(0, 1, vec![0, 1]), tile(1, 1, vec![1, 2])],
            ToastFlags::default(),
        );
        assert!(matches!(layers(&t), Err(Error::InvalidToast(_))));
    }

    #[test]
    fn residual_examples() {
        let t = Toast::new(
            vec![
                tile(0, 1, vec![0]),
                tile(1, 2, vec![0, 1, 2]),
                tile(2, 3, vec![0, 1, 2, 3, 4]),
            ],
            ToastFlags::default(),
        );
        assert_eq!(residual(&t, 0).unwrap(), VertexSet::from_vec(vec![0]));
        assert_eq!(residual(&t, 1).unwrap(), VertexSet::from_vec(vec![1, 2]));
        assert_eq!(residual(&t, 2).unwrap(), VertexSet::from_vec(vec![3, 4]));
        assert!(matches!(residual(&t, 9), Err(Error::NotFound(_))));
    }

    #[test]
    fn verify_nested_boxes_on_torus() {
        let g = Graph::build_grid(&[36, 36], Topology::Torus).unwrap();
        let inner = tile(0, 1, boxy(&g, 16, 16, 4, 4));
        let mid = tile(1, 2, boxy(&g, 12, 12, 12, 12));
        let all = tile(2, 3, (0..g.vertex_count()).collect());
        let t = Toast::new(vec![inner, mid, all], ToastFlags::default());
        let rep = verify_toast(&g, &t);
        assert!(rep.check("T1").unwrap().pass);
        assert!(rep.check("T2").unwrap().pass);
        assert!(rep.check("T3").unwrap().pass);
        assert!(rep.check("T4").unwrap().pass);

        // independent pairwise loop for T2 on the same fixture
        for a in &t.tiles {
            for b in &t.tiles {
                if a.id >= b.id {
                    continue;
                }
                let ba = g.ball(&a.vertices, 1);
                let bb = g.ball(&b.vertices, 1);
                assert!(
                    ba.is_disjoint(&b.vertices)
                        || ba.is_subset(&b.vertices)
                        || bb.is_subset(&a.vertices)
                );
            }
        }
    }

    #[test]
    fn verify_t2_violation() {
        let g = Graph::build_grid(&[12, 12], Topology::Window).unwrap();
        // two adjacent blocks, neither nested
        let a = tile(0, 1, boxy(&g, 2, 2, 3, 3));
        let b = tile(1, 1, boxy(&g, 5, 2, 3, 3));
        let t = Toast::new(vec![a, b], ToastFlags::default());
        let rep = verify_toast(&g, &t);
        assert!(!rep.check("T2").unwrap().pass);
        let w = rep.check("T2").unwrap().witness.as_ref().unwrap();
        assert_eq!(w["violating_pairs"][0][0], 0);
        assert_eq!(w["violating_pairs"][0][1], 1);
    }

    #[test]
    fn verify_t3_violation() {
        let g = Graph::build_grid(&[16, 16], Topology::Window).unwrap();
        let mut far = boxy(&g, 1, 1, 2, 2);
        far.extend(boxy(&g, 10, 10, 2, 2));
        let t = Toast::new(vec![tile(0, 1, far)], ToastFlags::default());
        let rep = verify_toast(&g, &t);
        assert!(!rep.check("T3").unwrap().pass);
    }

    #[test]
    fn duplicate_whole_graph_tiles() {
        let g = Graph::build_grid(&[4, 4], Topology::Torus).unwrap();
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        let t = Toast::new(
            vec![tile(0, 1, all.clone()), tile(1, 2, all)],
            ToastFlags::default(),
        );
        let rep = verify_toast(&g, &t);
        // nesting holds because the 1-ball of the whole graph is itself
        assert!(rep.check("T2").unwrap().pass);
        // the outer copy has an empty residual
        assert!(!rep.check("T3").unwrap().pass);
        let w = rep.check("T3").unwrap().witness.as_ref().unwrap();
        assert_eq!(w["disconnected_residuals"][0], 1);
    }

    #[test]
    fn empty_toast_t1() {
        let g = Graph::build_grid(&[3, 3], Topology::Torus).unwrap();
        let t = Toast::default();
        let rep = verify_toast(&g, &t);
        assert!(!rep.check("T1").unwrap().pass);
        assert!(rep.check("T2").unwrap().pass);
        assert!(rep.check("T3").unwrap().pass);
    }

    #[test]
    fn refine_fixpoint_on_connected_toast() {
        let g = Graph::build_grid(&[36, 36], Topology::Torus).unwrap();
        let t = Toast::new(
            vec![
                tile(0, 1, boxy(&g, 16, 16, 4, 4)),
                tile(1, 2, boxy(&g, 12, 12, 12, 12)),
                tile(2, 3, (0..g.vertex_count()).collect()),
            ],
            ToastFlags::default(),
        );
        let (out, coverage) = refine_to_connected(&g, &t).unwrap();
        assert_eq!(out.tiles.len(), 3);
        assert_eq!(coverage, Ratio::new(1, 1));
    }

    #[test]
    fn refine_absorbs_disconnected_tile() {
        let g = Graph::build_grid(&[24, 24], Topology::Window).unwrap();
        // M has a disconnected residual; K covers it; P covers K
        let mut m = boxy(&g, 8, 8, 2, 2);
        m.extend(boxy(&g, 12, 12, 2, 2));
        let t = Toast::new(
            vec![
                tile(0, 1, m),
                tile(1, 2, boxy(&g, 5, 5, 12, 12)),
                tile(2, 3, boxy(&g, 2, 2, 20, 20)),
            ],
            ToastFlags::default(),
        );
        let (out, coverage) = refine_to_connected(&g, &t).unwrap();
        assert_eq!(out.tiles.len(), 1);
        assert_eq!(out.tiles[0].id, 1);
        let rep = verify_toast(&g, &out);
        assert!(rep.check("T2").unwrap().pass);
        assert!(rep.check("T3").unwrap().pass);
        assert_eq!(coverage, Ratio::new(144, 576));
    }

    #[test]
    fn refine_uncoverable_singletons() {
        let g = Graph::build_grid(&[9, 9], Topology::Window).unwrap();
        // T3 fails overall (one far-apart pair tile), so the kernel runs,
        // and no tile has a cover.
        let mut bad = vec![g.index_of(&[0, 0])];
        bad.push(g.index_of(&[8, 8]));
        let t = Toast::new(
            vec![
                tile(0, 1, vec![g.index_of(&[4, 4])]),
                tile(1, 1, bad),
            ],
            ToastFlags::default(),
        );
        let (out, coverage) = refine_to_connected(&g, &t).unwrap();
        assert!(out.tiles.is_empty());
        assert_eq!(coverage, Ratio::zero());
    }

    #[test]
    fn refine_coverage_monotone_in_levels() {
        // nested boxes with a disconnected bottom tile force the kernel to
        // run; deeper stacks keep more
        let g = Graph::build_grid(&[40, 40], Topology::Window).unwrap();
        let mut coverages = Vec::new();
        for levels in 2..=4usize {
            let mut tiles = Vec::new();
            let mut bad = boxy(&g, 16, 16, 1, 1);
            bad.extend(boxy(&g, 19, 19, 1, 1));
            tiles.push(tile(0, 1, bad));
            for k in 0..levels {
                let inset = 14 - 4 * k;
                let side = 40 - 2 * inset;
                tiles.push(tile(k + 1, k + 2, boxy(&g, inset, inset, side, side)));
            }
            let toast = Toast::new(tiles, ToastFlags::default());
            let (out, coverage) = refine_to_connected(&g, &toast).unwrap();
            let rep = verify_toast(&g, &out);
            assert!(rep.check("T2").unwrap().pass);
            assert!(rep.check("T3").unwrap().pass);
            coverages.push(coverage);
        }
        assert!(coverages[0] <= coverages[1] && coverages[1] <= coverages[2]);
        assert!(coverages[0] < coverages[2]);
    }

    #[test]
    fn toast_json_shape() {
        let t = Toast::new(
            vec![tile(3, 2, vec![7, 1])],
            ToastFlags {
                claims_connected: true,
                claims_layered: false,
            },
        );
        let js = serde_json::to_value(&t).unwrap();
        assert_eq!(js["tiles"][0]["id"], 3);
        assert_eq!(js["tiles"][0]["level"], 2);
        assert_eq!(js["tiles"][0]["vertices"], serde_json::json!([1, 7]));
        assert_eq!(js["flags"]["claims_connected"], true);
    }
}
