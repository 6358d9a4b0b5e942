use prymgraph_core::canon::canonical_key;
use prymgraph_core::cover::{enumerate_covers, realize_cover};
use prymgraph_core::fs::{fs_decompositions, fs_witness, in_fs_closure, quotient_prefilter};
use prymgraph_core::quintic::{config_to_graph, enumerate_configs};
use prymgraph_core::realize::{
    canonical_realization, realize, stabilize, stabilize_cover, TailLibrary, TailMode,
};
use prymgraph_core::verify::{self, NonFsSettings, Status};
use prymgraph_core::{fixtures, DoubleCover, DualGraph, SingularityType};

#[test]
fn d4_cubic_pipeline() {
    let g = fixtures::d4_cubic();
    assert_eq!(g.genus().unwrap(), 1);
    let lib = TailLibrary::for_types(TailMode::Canonical, &[SingularityType::d(4)]).unwrap();
    let r = realize(&g, &canonical_realization(&g, &lib).unwrap()).unwrap();
    assert_eq!(
        canonical_key(&r).unwrap(),
        canonical_key(&fixtures::d4_cubic_realized()).unwrap()
    );
    let s = stabilize(&r).unwrap();
    assert_eq!(
        canonical_key(&s).unwrap(),
        canonical_key(&fixtures::d4_cubic_stabilized()).unwrap()
    );
}

#[test]
fn quintic_q_cup_l_has_genus_six_throughout() {
    let g = fixtures::quintic_q_cup_l();
    assert_eq!(g.genus().unwrap(), 6);
    let lib = TailLibrary::for_types(
        TailMode::Canonical,
        &[SingularityType::a(2), SingularityType::d(4)],
    )
    .unwrap();
    let r = realize(&g, &canonical_realization(&g, &lib).unwrap()).unwrap();
    assert_eq!(r.genus().unwrap(), 6);
    assert_eq!(stabilize(&r).unwrap().genus().unwrap(), 6);
}

#[test]
fn a7_line_is_contracted() {
    let s = stabilize(&fixtures::a7_quartic_line_realized()).unwrap();
    assert_eq!(s.vertex_count(), 2);
    assert_eq!(s.edge_count(), 1);
    assert_eq!(s.genus().unwrap(), 6);
}

#[test]
fn fs_fixtures_are_detected_with_their_n() {
    for n in 1..=4 {
        let c = fixtures::fs_cover(n);
        let best = fs_decompositions(&c).unwrap().iter().map(|d| d.n).max();
        assert_eq!(best, Some(n));
        assert_eq!(in_fs_closure(&c, 2).unwrap(), n >= 2);
        if n >= 2 {
            assert_eq!(fs_witness(&c, 2).unwrap().unwrap().n, n);
            assert!(quotient_prefilter(&c));
        }
    }
}

#[test]
fn a3_stable_cover_is_not_in_the_closure() {
    let c = fixtures::a3_quintic_cover();
    let p = c.prym_profile().unwrap();
    assert_eq!((p.abelian_dim, p.torus_rank), (4, 1));
    assert!(!in_fs_closure(&c, 2).unwrap());
}

#[test]
fn cover_json_round_trip() {
    let c = fixtures::fs_cover(3);
    let back = DoubleCover::from_json_str(&c.to_json_string()).unwrap();
    assert_eq!(back.canonical_key().unwrap(), c.canonical_key().unwrap());
    let g = fixtures::quintic_q_cup_l();
    let back = DualGraph::from_json_str(&g.to_json_string()).unwrap();
    assert_eq!(canonical_key(&back).unwrap(), canonical_key(&g).unwrap());
}

#[test]
fn realized_covers_of_a1_a2_quintic() {
    let g = fixtures::a1_a2_quintic();
    let lib = TailLibrary::for_types(TailMode::Canonical, &[SingularityType::a(2)]).unwrap();
    let choice = canonical_realization(&g, &lib).unwrap();
    let mut profiles: Vec<_> = enumerate_covers(&g)
        .unwrap()
        .iter()
        .map(|c| {
            let s = stabilize_cover(&realize_cover(c, &choice).unwrap()).unwrap();
            let p = s.prym_profile().unwrap();
            (p.abelian_dim, p.torus_rank)
        })
        .collect();
    profiles.sort();
    // The crossing bit on the node loop over a split component gives a
    // compact Prym.
    assert_eq!(profiles, vec![(4, 1), (5, 0)]);
}

#[test]
fn small_corpus_run_is_clean_and_deterministic() {
    let settings = NonFsSettings {
        allowable_only: true,
        tail_cap: 1,
        delta_cap: 3,
        inject_fs: Vec::new(),
        check_realized: true,
    };
    let a = verify::verify_nonfs(&settings).unwrap();
    assert_eq!(a.status, Status::Passed);
    assert!(a.witnesses.is_empty());
    assert_eq!(a.checks.riemann_hurwitz_violations, 0);
    let b = verify::verify_nonfs(&settings).unwrap();
    assert_eq!(
        verify::without_timing(&a).unwrap().to_string(),
        verify::without_timing(&b).unwrap().to_string()
    );
}

#[test]
fn every_enumerated_config_graph_is_valid() {
    for c in enumerate_configs(false, 6).unwrap().iter().step_by(13) {
        let g = config_to_graph(c);
        g.validate_bipartite().unwrap();
        assert_eq!(g.genus().unwrap(), 6);
    }
}

#[test]
fn reports_carry_their_status() {
    assert_eq!(verify::strata_table().unwrap().status, Status::Passed);
    assert_eq!(verify::run_examples().unwrap().status, Status::Passed);
    assert_eq!(verify::verify_tree_lemma(7).unwrap().status, Status::Passed);
}
