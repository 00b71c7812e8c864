//! Level sets: seeded generation of the nested cell/collar hierarchy on
//! lattice graphs, the P1–P3 verifier that defines correctness for it, the
//! per-component filling step, and extraction of a toast from filled levels.
//!
//! Levels `1..N-1` are unions of per-cell blocks: each level-n cell (an axis
//! box of side `scale^n`) keeps the vertices at depth `>= gamma_n` from its
//! own walls and at depth `>= gamma_m + 4r(m-n)` from every higher non-top
//! wall, which makes the 4r-ball of any level-n point sit inside every higher
//! level. The top level is the whole torus, or a seeded arena box on a
//! window.

use crate::error::{Error, Result};
use crate::graph::{Graph, Topology, VertexSet};
use crate::report::Report;
use crate::toast::{Tile, Toast, ToastFlags};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSets {
    pub r: usize,
    pub levels: Vec<VertexSet>,
    pub component_bounds: Vec<usize>,
}

struct Scheme {
    r: usize,
    num_levels: usize,
    /// cell side per level, 1-based index shifted down by one
    cell_side: Vec<usize>,
    /// own-wall margin per non-top level
    gamma: Vec<usize>,
    /// per-level wall offsets (unused entry for the top level)
    offsets: Vec<Vec<usize>>,
    /// window arena origin; None on a torus
    arena: Option<Vec<usize>>,
    arena_side: usize,
}

impl Scheme {
    /// Distance from `coords` to the nearest level-`m` cell wall layer
    /// (0-based level index; only valid for non-top levels).
    fn cell_depth(&self, m: usize, coords: &[usize]) -> usize {
        let s = self.cell_side[m];
        let mut depth = usize::MAX;
        for (axis, &c) in coords.iter().enumerate() {
            let anchor = self.arena.as_ref().map_or(0, |a| a[axis]) + self.offsets[m][axis];
            let p = (c as i64 - anchor as i64).rem_euclid(s as i64) as usize;
            depth = depth.min(p.min(s - 1 - p));
        }
        depth
    }

    /// Depth inside the arena box; `None` when outside. Tori have no arena.
    fn arena_depth(&self, coords: &[usize]) -> Option<usize> {
        let a = self.arena.as_ref()?;
        let mut depth = usize::MAX;
        for (axis, &c) in coords.iter().enumerate() {
            if c < a[axis] || c >= a[axis] + self.arena_side {
                return Some(usize::MAX); // marker handled by caller
            }
            depth = depth.min((c - a[axis]).min(a[axis] + self.arena_side - 1 - c));
        }
        Some(depth)
    }

    fn member(&self, n: usize, coords: &[usize]) -> bool {
        // n is 0-based here; top level index = num_levels - 1
        let top = self.num_levels - 1;
        if let Some(a) = &self.arena {
            let _ = a;
            match self.arena_depth(coords) {
                Some(usize::MAX) | None => return false,
                Some(depth) => {
                    if n < top && depth < 4 * self.r * (top - n) {
                        return false;
                    }
                }
            }
        }
        for m in n..top {
            if self.cell_depth(m, coords) < self.gamma[m] + 4 * self.r * (m - n) {
                return false;
            }
        }
        true
    }
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

fn build_scheme(
    g: &Graph,
    r: usize,
    num_levels: usize,
    scale: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Scheme> {
    let sides = g.dims().to_vec();
    let d = sides.len();
    let mut cell_side = Vec::with_capacity(num_levels);
    let mut s = 1usize;
    for _ in 0..num_levels {
        s = s
            .checked_mul(scale)
            .ok_or_else(|| Error::GenerationFailed("cell size overflow".into()))?;
        cell_side.push(s);
    }
    let top_side = cell_side[num_levels - 1];

    let arena = match g.topology() {
        Topology::Torus => {
            for (m, &s) in cell_side.iter().enumerate().take(num_levels - 1) {
                for &side in &sides {
                    if side % s != 0 || side / s < 2 {
                        return Err(Error::GenerationFailed(format!(
                            "level {} cells of side {} do not properly partition torus side {}",
                            m + 1,
                            s,
                            side
                        )));
                    }
                }
            }
            None
        }
        Topology::Window => {
            let mut origin = Vec::with_capacity(d);
            for &side in &sides {
                if side < top_side + 2 {
                    return Err(Error::GenerationFailed(format!(
                        "window side {side} cannot host an arena of side {top_side} with rim margin"
                    )));
                }
                origin.push(rng.gen_range(1..=side - top_side - 1));
            }
            Some(origin)
        }
        Topology::Explicit => {
            return Err(Error::UnsupportedTopology(
                "level generation requires a lattice graph".into(),
            ))
        }
    };

    let mut gamma = Vec::with_capacity(num_levels.saturating_sub(1));
    for &s in cell_side.iter().take(num_levels - 1) {
        // wide enough that 3r-components never join across a wall, and that
        // block diameters stay below the cell side
        let sep = ceil_div(3 * r, 2);
        let diam = ceil_div((s - 1) * (d.max(1) - 1), 2 * d.max(1));
        let gm = sep.max(diam).max(1);
        if s < 2 * gm + 1 {
            return Err(Error::GenerationFailed(format!(
                "collar {gm} swallows cells of side {s} (r = {r})"
            )));
        }
        gamma.push(gm);
    }

    let mut offsets = Vec::with_capacity(num_levels);
    for &s in &cell_side {
        offsets.push((0..d).map(|_| rng.gen_range(0..s)).collect());
    }

    Ok(Scheme {
        r,
        num_levels,
        cell_side,
        gamma,
        offsets,
        arena,
        arena_side: top_side,
    })
}

fn levels_from_scheme(g: &Graph, scheme: &Scheme) -> Result<LevelSets> {
    let n = g.vertex_count();
    let top = scheme.num_levels - 1;
    let mut levels = Vec::with_capacity(scheme.num_levels);
    for lvl in 0..scheme.num_levels {
        let set: VertexSet = if lvl == top && scheme.arena.is_none() {
            (0..n).collect()
        } else {
            (0..n)
                .filter(|&v| scheme.member(lvl, &g.coords(v).unwrap()))
                .collect()
        };
        if set.is_empty() {
            return Err(Error::GenerationFailed(format!(
                "level {} is empty after collar removal",
                lvl + 1
            )));
        }
        levels.push(set);
    }
    let component_bounds = levels
        .iter()
        .map(|set| {
            let comps = g.n_components(set, 3 * scheme.r)?;
            let diam = comps
                .iter()
                .map(|c| set_diameter(g, c))
                .max()
                .unwrap_or(0);
            Ok(diam + 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelSets {
        r: scheme.r,
        levels,
        component_bounds,
    })
}

/// Largest graph distance between two members of `set`.
pub(crate) fn set_diameter(g: &Graph, set: &VertexSet) -> usize {
    set.as_slice()
        .par_iter()
        .map(|&v| {
            let dist = g.bfs_masked([v], usize::MAX, None);
            set.iter().map(|u| dist[u]).max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Seeded search over cell offsets; the verifier is the acceptance gate.
pub fn generate_level_sets(
    g: &Graph,
    r: usize,
    num_levels: usize,
    scale: usize,
    seed: u64,
) -> Result<LevelSets> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    if num_levels == 0 {
        return Err(Error::InvalidParameter("num_levels must be >= 1".into()));
    }
    if scale < 2 {
        return Err(Error::InvalidParameter("scale must be >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: usize = 16;
    let mut last_failure = String::new();
    for _ in 0..ATTEMPTS {
        let scheme = build_scheme(g, r, num_levels, scale, &mut rng)?;
        let ls = levels_from_scheme(g, &scheme)?;
        let report = verify_level_sets(g, &ls);
        if report.pass() {
            return Ok(ls);
        }
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        last_failure = failed.join(", ");
    }
    Err(Error::GenerationFailed(format!(
        "no offset assignment passed verification within {ATTEMPTS} attempts (failing checks: {last_failure})"
    )))
}

/// P1: 3r-components of each level have diameter below the recorded bound.
/// P2: the r-ball of every vertex sits inside some level; vertices whose
/// r-ball leaves the filled top level are exempt and only counted.
/// P3: for n < m, the 4r-ball of a level-n vertex nests in or avoids level m.
pub fn verify_level_sets(g: &Graph, ls: &LevelSets) -> Report {
    let mut report = Report::new();
    let n_vertices = g.vertex_count();
    let r = ls.r.max(1);

    // P1
    let mut p1_witness = None;
    'p1: for (idx, set) in ls.levels.iter().enumerate() {
        let bound = ls.component_bounds.get(idx).copied().unwrap_or(0);
        match g.n_components(set, 3 * r) {
            Ok(comps) => {
                for comp in comps {
                    let diam = set_diameter(g, &comp);
                    if diam >= bound {
                        p1_witness = Some(json!({
                            "level": idx + 1,
                            "component_min_vertex": comp.first(),
                            "diameter": diam,
                            "bound": bound,
                        }));
                        break 'p1;
                    }
                }
            }
            Err(e) => {
                p1_witness = Some(json!({"level": idx + 1, "error": e.to_string()}));
                break 'p1;
            }
        }
    }
    report.push("P1", p1_witness.is_none(), p1_witness);

    // P2
    #[derive(Clone, Copy, PartialEq)]
    enum P2 {
        Ok,
        Exempt,
        Fail,
    }
    let masks: Vec<Vec<bool>> = ls.levels.iter().map(|s| s.mask(n_vertices)).collect();
    if let Some(top) = ls.levels.last() {
        let filled_top = g
            .fill_for_levels(top)
            .unwrap_or_else(|_| top.clone())
            .mask(n_vertices);
        let verdicts: Vec<P2> = (0..n_vertices)
            .into_par_iter()
            .map(|v| {
                let dist = g.bfs_masked([v], r, None);
                let members: Vec<usize> = (0..n_vertices).filter(|&u| dist[u] <= r).collect();
                if members.iter().any(|&u| !filled_top[u]) {
                    P2::Exempt
                } else if masks.iter().any(|mask| members.iter().all(|&u| mask[u])) {
                    P2::Ok
                } else {
                    P2::Fail
                }
            })
            .collect();
        let exempt_count = verdicts.iter().filter(|&&s| s == P2::Exempt).count();
        let fail = verdicts.iter().position(|&s| s == P2::Fail);
        report.push(
            "P2",
            fail.is_none(),
            Some(match fail {
                Some(v) => json!({"vertex": v, "exemptions": exempt_count}),
                None => json!({"exemptions": exempt_count}),
            }),
        );
    } else {
        report.push("P2", n_vertices == 0, Some(json!({"error": "no levels"})));
    }

    // P3
    let mut p3_witness = None;
    'p3: for n in 0..ls.levels.len() {
        for m in (n + 1)..ls.levels.len() {
            let bad = ls.levels[n].as_slice().par_iter().find_map_first(|&x| {
                let dist = g.bfs_masked([x], 4 * r, None);
                let mut inside = true;
                let mut disjoint = true;
                for u in 0..n_vertices {
                    if dist[u] <= 4 * r {
                        if masks[m][u] {
                            disjoint = false;
                        } else {
                            inside = false;
                        }
                    }
                }
                if inside || disjoint {
                    None
                } else {
                    Some(x)
                }
            });
            if let Some(x) = bad {
                p3_witness = Some(json!({"level_n": n + 1, "level_m": m + 1, "vertex": x}));
                break 'p3;
            }
        }
    }
    report.push("P3", p3_witness.is_none(), p3_witness);
    report
}

/// Fills every 3r-component of each level separately, skipping components
/// that already sit inside another component's filling.
pub fn fill_levels(g: &Graph, ls: &LevelSets) -> Result<Vec<VertexSet>> {
    let r = ls.r.max(1);
    let mut out = Vec::with_capacity(ls.levels.len());
    for (idx, level) in ls.levels.iter().enumerate() {
        let mut comps = g.n_components(level, 3 * r)?;
        comps.sort_by_key(|c| c.first());
        let mut fillings: Vec<VertexSet> = Vec::new();
        for comp in &comps {
            if fillings.iter().any(|f| comp.is_subset(f)) {
                continue;
            }
            let filled = g.fill_for_levels(comp).map_err(|e| {
                Error::NotFillable(format!(
                    "level {} component at {:?}: {}",
                    idx + 1,
                    comp.first(),
                    e
                ))
            })?;
            fillings.push(filled);
        }
        let mut w = VertexSet::new();
        for f in fillings {
            w = w.union(&f);
        }
        out.push(w);
    }
    Ok(out)
}

/// Connected components of each filled level become tiles, tagged by level.
/// The caller verifies the result; this constructor does not self-certify.
pub fn levels_to_toast(g: &Graph, filled: &[VertexSet]) -> Toast {
    let mut tiles = Vec::new();
    let mut id = 0usize;
    for (idx, w) in filled.iter().enumerate() {
        for comp in g.connected_components(w) {
            tiles.push(Tile {
                id,
                level: idx + 1,
                vertices: comp,
            });
            id += 1;
        }
    }
    Toast::new(
        tiles,
        ToastFlags {
            claims_connected: true,
            claims_layered: true,
        },
    )
}
