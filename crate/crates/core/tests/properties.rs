use std::collections::BTreeSet;

use proptest::prelude::*;
use prymgraph_core::canon::canonical_key;
use prymgraph_core::cover::{build_cover, enumerate_covers, realize_cover, Sheet};
use prymgraph_core::fs::fs_decompositions;
use prymgraph_core::quintic::{admitted_types, config_to_graph, enumerate_configs};
use prymgraph_core::realize::{
    realization_choices, realize, stabilize, stabilize_by, stabilize_cover, TailLibrary, TailMode,
};
use prymgraph_core::{CoverSpec, DualGraph, SingularityType, Vertex};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// Connected black graph: a path through all vertices plus extra edges.
fn graph_strategy(max_v: usize, max_extra: usize) -> impl Strategy<Value = DualGraph> {
    (1..=max_v)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(0u32..3, n),
                prop::collection::vec((0..n, 0..n), 0..=max_extra),
            )
        })
        .prop_map(|(genera, extra)| {
            let mut g = DualGraph::new();
            for &k in &genera {
                g.add_vertex(Vertex::black(k));
            }
            for v in 1..genera.len() {
                g.add_edge(v - 1, v);
            }
            for (a, b) in extra {
                g.add_edge(a, b);
            }
            g
        })
}

/// Same, with vertex 0 of positive genus so the graph can be stabilized.
fn stabilizable_strategy() -> impl Strategy<Value = DualGraph> {
    graph_strategy(6, 5).prop_map(|mut g| {
        g.vertex_mut(0).genus = g.vertex(0).genus.max(1);
        g
    })
}

fn shuffled(g: &DualGraph, seed: u64) -> DualGraph {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut vperm: Vec<usize> = (0..g.vertex_count()).collect();
    let mut hperm: Vec<usize> = (0..g.half_edge_count()).collect();
    vperm.shuffle(&mut rng);
    hperm.shuffle(&mut rng);
    g.permuted(&vperm, &hperm)
}

fn components(g: &DualGraph) -> u32 {
    // Union-find, independent of the graph's own traversal.
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (a, b) in g.edge_endpoints() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..g.vertex_count())
        .filter(|&v| find(&mut parent, v) == v)
        .count() as u32
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_key_ignores_labels(g in graph_strategy(7, 6), seed in any::<u64>()) {
        prop_assert_eq!(canonical_key(&g).unwrap(), canonical_key(&shuffled(&g, seed)).unwrap());
    }

    #[test]
    fn genus_is_vertex_genera_plus_betti(g in graph_strategy(7, 6)) {
        let e = g.edge_count() as u32;
        let v = g.vertex_count() as u32;
        let b1 = e + components(&g) - v;
        prop_assert_eq!(g.first_betti().unwrap(), b1);
        let sum: u32 = g.vertices().iter().map(|x| x.genus).sum();
        prop_assert_eq!(g.genus().unwrap(), sum + b1);
    }

    #[test]
    fn betti_is_additive(a in graph_strategy(5, 4), b in graph_strategy(5, 4)) {
        let u = a.disjoint_union(&b);
        prop_assert_eq!(u.first_betti().unwrap(), a.first_betti().unwrap() + b.first_betti().unwrap());
        prop_assert_eq!(u.component_count(), 2);
    }

    #[test]
    fn full_induced_subgraph_is_the_graph(g in graph_strategy(7, 6)) {
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        prop_assert_eq!(canonical_key(&g.induced_subgraph(&all)).unwrap(), canonical_key(&g).unwrap());
    }

    #[test]
    fn stabilization_is_idempotent_and_confluent(g in stabilizable_strategy(), seed in any::<u64>()) {
        let s = stabilize(&g).unwrap();
        prop_assert_eq!(s.genus().unwrap(), g.genus().unwrap());
        let again = stabilize(&s).unwrap();
        prop_assert_eq!(canonical_key(&again).unwrap(), canonical_key(&s).unwrap());
        let mut rng = StdRng::seed_from_u64(seed);
        let r = stabilize_by(&g, |c| rng.gen_range(0..c.len())).unwrap();
        prop_assert_eq!(canonical_key(&r).unwrap(), canonical_key(&s).unwrap());
    }

    #[test]
    fn cover_stabilization_covers_the_stable_base(
        g in stabilizable_strategy(),
        bits in any::<u64>(),
        nonsplit in any::<u8>(),
    ) {
        let mut spec = CoverSpec::all_split(&g);
        for e in 0..g.edge_count() {
            spec.cocycle[e] = bits >> (e % 64) & 1 == 1;
        }
        for v in 0..g.vertex_count().min(8) {
            if nonsplit >> v & 1 == 1 && g.vertex(v).genus >= 1 {
                spec.sheets[v] = Sheet::Nonsplit;
            }
        }
        let c = build_cover(&g, &spec).unwrap();
        prop_assume!(c.is_connected());
        prop_assert!(c.satisfies_riemann_hurwitz().unwrap());
        let s = stabilize_cover(&c).unwrap();
        s.validate().unwrap();
        prop_assert_eq!(canonical_key(s.base()).unwrap(), canonical_key(&stabilize(&g).unwrap()).unwrap());
        prop_assert_eq!(s.total().genus().unwrap(), 2 * g.genus().unwrap() - 1);
        let p = c.prym_profile().unwrap();
        prop_assert_eq!(p, s.prym_profile().unwrap());
        prop_assert_eq!(p.abelian_dim + p.torus_rank, g.genus().unwrap() - 1);
    }

    #[test]
    fn cover_classes_ignore_labels(g in graph_strategy(4, 3), seed in any::<u64>()) {
        let keys = |g: &DualGraph| -> BTreeSet<_> {
            enumerate_covers(g)
                .unwrap()
                .iter()
                .map(|c| {
                    let n = fs_decompositions(c).unwrap().iter().map(|d| d.n).max().unwrap_or(0);
                    (c.canonical_key().unwrap(), n)
                })
                .collect()
        };
        prop_assert_eq!(keys(&g), keys(&shuffled(&g, seed)));
    }

    #[test]
    fn etale_covers_of_forests_are_trivial(
        sizes in prop::collection::vec(1usize..5, 1..4),
        parents in prop::collection::vec(any::<prop::sample::Index>(), 12),
        bits in any::<u16>(),
    ) {
        let mut g = DualGraph::new();
        let mut next = 0;
        for &s in &sizes {
            for i in 0..s {
                let v = g.add_vertex(Vertex::black(0));
                if i > 0 {
                    g.add_edge(next + parents[v].index(i), v);
                }
            }
            next += s;
        }
        let mut spec = CoverSpec::all_split(&g);
        for e in 0..g.edge_count() {
            spec.cocycle[e] = bits >> e & 1 == 1;
        }
        let c = build_cover(&g, &spec).unwrap();
        prop_assert_eq!(c.total().component_count(), 2 * sizes.len());
    }

    #[test]
    fn delta_from_tables(k in 1u32..=20, j in 4u32..=20) {
        prop_assert_eq!(SingularityType::a(k).delta(), k.div_ceil(2));
        prop_assert_eq!(SingularityType::d(j).delta(), j / 2 + 1);
    }
}

fn sample_configs() -> Vec<DualGraph> {
    enumerate_configs(true, 6)
        .unwrap()
        .iter()
        .step_by(97)
        .map(config_to_graph)
        .collect()
}

#[test]
fn realization_keeps_genus_six() {
    let lib = TailLibrary::for_types(TailMode::All { cap: 1 }, &admitted_types(true, 6)).unwrap();
    for g in sample_configs() {
        for choice in realization_choices(&g, &lib).unwrap().iter().take(20) {
            let r = realize(&g, choice).unwrap();
            assert!(r.is_realized());
            assert_eq!(r.genus().unwrap(), 6);
            assert_eq!(stabilize(&r).unwrap().genus().unwrap(), 6);
        }
    }
}

#[test]
fn realized_quintic_covers_have_genus_eleven() {
    let lib = TailLibrary::for_types(TailMode::Canonical, &admitted_types(true, 6)).unwrap();
    for g in sample_configs() {
        let choice = &realization_choices(&g, &lib).unwrap()[0];
        for c in enumerate_covers(&g).unwrap() {
            let r = realize_cover(&c, choice).unwrap();
            assert_eq!(r.total().genus().unwrap(), 11);
            assert!(r.is_admissible());
            let s = stabilize_cover(&r).unwrap();
            assert_eq!(s.total().genus().unwrap(), 11);
        }
    }
}
