//! Property tests for the metric/boundary/filling identities, trichotomy
//! consequences, circuit sum preservation, and parity subgraph behavior on
//! randomized corpora.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toastlab::graph::{BoundaryMode, Graph, Topology, VertexSet};
use toastlab::levels::{fill_levels, generate_level_sets, levels_to_toast};
use toastlab::matching::{apply_circuit, FractionalMatching};
use toastlab::oracles::{oracle_parity_exists, random_connected_graph};
use toastlab::orientation::{parity_subgraph, Cycle};
use toastlab::toast::{layers, verify_toast, Toast};
use toastlab::Error;

fn torus_and_set() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    ((3usize..=7), (3usize..=7))
        .prop_flat_map(|(a, b)| {
            let n = a * b;
            (Just(vec![a, b]), prop::collection::vec(0..n, 0..=n / 2))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_monotone_and_composes((dims, ids) in torus_and_set(), extra in prop::collection::vec(0usize..49, 0..4), m in 0usize..3, n in 0usize..3) {
        let g = Graph::build_grid(&dims, Topology::Torus).unwrap();
        let c = VertexSet::from_vec(ids);
        let bigger = c.union(&VertexSet::from_vec(
            extra.into_iter().map(|v| v % g.vertex_count()).collect(),
        ));
        prop_assert!(g.ball(&c, n).is_subset(&g.ball(&bigger, n)));
        // tori have no rim, so composition is exact
        prop_assert_eq!(g.ball(&g.ball(&c, m), n), g.ball(&c, m + n));
    }

    #[test]
    fn boundary_partition_identities((dims, ids) in torus_and_set(), n in 1usize..4) {
        let g = Graph::build_grid(&dims, Topology::Torus).unwrap();
        let c = VertexSet::from_vec(ids);
        let boundary = g.boundary(&c, n, BoundaryMode::Outer).unwrap();
        prop_assert!(boundary.is_disjoint(&c));
        prop_assert_eq!(boundary.union(&c), g.ball(&c, n));
    }

    #[test]
    fn visible_boundary_contained_in_outer(ids in prop::collection::vec(0usize..121, 0..20), n in 1usize..3) {
        let g = Graph::build_grid(&[11, 11], Topology::Window).unwrap();
        let c = VertexSet::from_vec(ids);
        let outer = g.boundary(&c, n, BoundaryMode::Outer).unwrap();
        let visible = g.boundary(&c, n, BoundaryMode::Visible).unwrap();
        prop_assert!(visible.is_subset(&outer));
    }

    #[test]
    fn fill_is_full_and_idempotent(ids in prop::collection::vec(0usize..121, 1..25)) {
        let g = Graph::build_grid(&[11, 11], Topology::Window).unwrap();
        let c = VertexSet::from_vec(ids);
        match g.fill(&c) {
            Ok(filled) => {
                prop_assert!(g.is_full(&filled).unwrap());
                prop_assert_eq!(g.fill(&filled).unwrap(), filled.clone());
                // enclosed vertices cannot reach the rim without crossing C
                let trapped = filled.difference(&c);
                let complement: VertexSet =
                    (0..g.vertex_count()).filter(|&v| !c.contains(v)).collect();
                for comp in g.connected_components(&complement) {
                    let escapes = comp.iter().any(|v| g.window_exterior().contains(v));
                    for v in comp.iter() {
                        if trapped.contains(v) {
                            prop_assert!(!escapes);
                        }
                    }
                }
            }
            Err(Error::NotFillable(_)) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }

    #[test]
    fn circuit_preserves_sums(len in 2usize..7, base in 1usize..4, eps in 1usize..3, anchor in 0usize..6) {
        // even cycle graph with constant numerators
        let n = 2 * len;
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let d = 8;
        let f: FractionalMatching = serde_json::from_value(serde_json::json!({
            "d": d,
            "num": g.edges().iter().map(|&(u, v)| (u, v, base)).collect::<Vec<_>>(),
        })).unwrap();
        let mut walk: Vec<usize> = (0..n).collect();
        walk.push(0);
        let cycle = Cycle::new(&g, walk).unwrap();
        let e_prime = (anchor % n, (anchor + 1) % n);
        match apply_circuit(&f, &cycle, e_prime, eps) {
            Ok(out) => {
                let mut sums = vec![0usize; n];
                for (e, j) in out.edges() {
                    sums[e.0] += j;
                    sums[e.1] += j;
                }
                prop_assert!(sums.iter().all(|&s| s == 2 * base));
            }
            Err(Error::OutOfRange(_, _)) => prop_assert!(base < eps || base + eps > d),
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }
}

#[test]
fn trichotomy_implies_laminarity_on_generated_toasts() {
    for seed in 0..6 {
        let g = Graph::build_grid(&[32, 32], Topology::Torus).unwrap();
        let ls = generate_level_sets(&g, 1, 2, 8, seed).unwrap();
        let toast = levels_to_toast(&g, &fill_levels(&g, &ls).unwrap());
        assert!(verify_toast(&g, &toast).check("T2").unwrap().pass);
        // no two tiles properly overlap
        for (i, a) in toast.tiles.iter().enumerate() {
            for b in &toast.tiles[i + 1..] {
                let ab = a.vertices.intersection(&b.vertices);
                assert!(ab.is_empty() || ab == a.vertices || ab == b.vertices);
            }
        }
        // stratification covers every tile exactly once
        let strata = layers(&toast).unwrap();
        let mut all: Vec<usize> = strata.into_iter().flatten().collect();
        all.sort_unstable();
        let mut ids: Vec<usize> = toast.tiles.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        assert_eq!(all, ids);
    }
}

#[test]
fn deleting_low_layers_preserves_the_axioms() {
    for seed in [1u64, 9, 23] {
        let g = Graph::build_grid(&[32, 32], Topology::Torus).unwrap();
        let ls = generate_level_sets(&g, 1, 2, 8, seed).unwrap();
        let toast = levels_to_toast(&g, &fill_levels(&g, &ls).unwrap());
        let strata = layers(&toast).unwrap();
        for k in 1..strata.len() {
            let dropped: Vec<usize> = strata[..k].iter().flatten().copied().collect();
            let rest: Vec<_> = toast
                .tiles
                .iter()
                .filter(|t| !dropped.contains(&t.id))
                .cloned()
                .collect();
            let sub = Toast::new(rest, toast.flags);
            let rep = verify_toast(&g, &sub);
            assert!(rep.check("T2").unwrap().pass, "seed {seed} k {k}");
            // T1 relative to the remaining union: every edge inside the
            // remaining support stays covered
            let w = rep.check("T1").unwrap().witness.as_ref().unwrap();
            assert_eq!(w["uncovered_count"], 0, "seed {seed} k {k}");
        }
    }
}

#[test]
fn parity_subgraph_on_random_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(7177);
    for _ in 0..200 {
        let n = rng.gen_range(2..=12);
        let g = random_connected_graph(n, rng.gen_range(0..=n), &mut rng);
        let mut p: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        if p.len() % 2 == 1 {
            p.pop();
        }
        let p = VertexSet::from_vec(p);
        let h = parity_subgraph(&g, &p).unwrap();
        let mut deg = vec![0usize; n];
        for (a, b) in h.iter() {
            deg[a] += 1;
            deg[b] += 1;
        }
        for v in 0..n {
            assert_eq!(deg[v] % 2 == 1, p.contains(v));
        }
    }
}

#[test]
fn parity_existence_matches_oracle_on_small_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(515);
    for _ in 0..60 {
        let n = rng.gen_range(2..=8);
        let g = random_connected_graph(n, rng.gen_range(0..=4), &mut rng);
        let p: VertexSet = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let constructed = parity_subgraph(&g, &p).is_ok();
        let exists = oracle_parity_exists(&g, &p).unwrap();
        assert_eq!(constructed, exists);
    }
}
