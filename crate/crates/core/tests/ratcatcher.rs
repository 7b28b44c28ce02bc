mod common;

use proptest::prelude::*;
use ratnest::branchdecomp::{validate, width};
use ratnest::fixtures;
use ratnest::oracle::{exact_bw, random_planar, OracleMode};
use ratnest::ratcatcher::{
    decide_planar_bw, has_inner_bridge, medial_graph, optimal_planar_decomposition,
    parse_sphere_cut, planar_branchwidth, serialize_sphere_cut, sphere_cut_decomposition,
    validate_sphere_cut,
};
use ratnest::Error;

#[test]
fn grid_branchwidth_equals_side() {
    for r in 2..=6 {
        assert_eq!(
            planar_branchwidth(&fixtures::grid(r, r)).unwrap(),
            r,
            "grid {r}"
        );
    }
}

#[test]
fn small_families() {
    assert_eq!(planar_branchwidth(&fixtures::k4()).unwrap(), 3);
    assert_eq!(planar_branchwidth(&fixtures::cycle(7)).unwrap(), 2);
    assert_eq!(planar_branchwidth(&fixtures::star(5)).unwrap(), 1);
    assert_eq!(planar_branchwidth(&fixtures::path(2)).unwrap(), 0);
    for k in 3..=8 {
        assert_eq!(
            planar_branchwidth(&fixtures::wheel(k)).unwrap(),
            3,
            "wheel {k}"
        );
    }
}

#[test]
fn k4_sphere_cut() {
    let e = fixtures::k4();
    let scd = sphere_cut_decomposition(&e).unwrap();
    assert!(validate_sphere_cut(&scd, &e).is_ok());
    assert_eq!(width(&scd.bd, e.graph()).unwrap(), 3);
    let text = serialize_sphere_cut(&scd);
    let back = parse_sphere_cut(&text).unwrap();
    assert!(validate_sphere_cut(&back, &e).is_ok());
    assert_eq!(serialize_sphere_cut(&back), text);
}

#[test]
fn inner_bridge_blocks_sphere_cuts() {
    // two triangles joined by a bridge
    let g = ratnest::graph::Graph::from_edges(
        6,
        &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)],
    )
    .unwrap();
    assert!(has_inner_bridge(&g));
    let e = common::embed(&g).unwrap();
    let scd = sphere_cut_decomposition(&e).unwrap();
    assert!(validate(&scd.bd, &g).is_ok());
    assert_eq!(width(&scd.bd, &g).unwrap(), 2);
    assert!(validate_sphere_cut(&scd, &e).is_err());
}

#[test]
fn medial_graph_is_four_regular_and_planar() {
    for e in [
        fixtures::k4(),
        fixtures::grid(3, 4),
        fixtures::wheel(6),
        fixtures::cycle(4),
    ] {
        let m = medial_graph(&e).unwrap();
        assert_eq!(m.edge_of.len(), e.graph().m());
        assert!((0..m.edge_of.len()).all(|x| m.degree(x) == 4));
        assert_eq!(m.ends.len(), 2 * e.graph().m());
        assert_eq!(m.genus, 0);
        assert_eq!(m.face_count, e.graph().n() + e.faces().len());
    }
}

#[test]
fn contract_violations() {
    assert!(matches!(
        planar_branchwidth(&fixtures::torus_grid(3)),
        Err(Error::Contract(_))
    ));
    assert!(matches!(
        decide_planar_bw(&fixtures::k4(), 0),
        Err(Error::Input(_))
    ));
    assert!(matches!(
        medial_graph(&fixtures::path(3)),
        Err(Error::Contract(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matches_exact_oracle(n in 3usize..9, extra in 0usize..8, seed in any::<u64>()) {
        let e = random_planar(n, n - 1 + extra, seed);
        prop_assume!(e.graph().m() <= 12);
        let exact = exact_bw(e.graph(), OracleMode::Exhaustive).unwrap().exact_bw;
        prop_assert_eq!(planar_branchwidth(&e).unwrap(), exact);
        let (w, bd) = optimal_planar_decomposition(&e).unwrap();
        prop_assert_eq!(w, exact);
        prop_assert!(validate(&bd, e.graph()).is_ok());
        prop_assert_eq!(width(&bd, e.graph()).unwrap(), exact);
    }

    #[test]
    fn decision_is_monotone(n in 3usize..14, extra in 0usize..14, seed in any::<u64>()) {
        let e = random_planar(n, n - 1 + extra, seed);
        let b = planar_branchwidth(&e).unwrap();
        let mut previous = false;
        for k in 1..=b + 2 {
            let yes = decide_planar_bw(&e, k).unwrap();
            prop_assert!(yes || !previous);
            prop_assert_eq!(yes, k >= b);
            previous = yes;
        }
    }

    #[test]
    fn bridgeless_graphs_get_valid_sphere_cuts(n in 3usize..12, extra in 0usize..12, seed in any::<u64>()) {
        let e = random_planar(n, n - 1 + extra, seed);
        let scd = sphere_cut_decomposition(&e).unwrap();
        prop_assert!(validate(&scd.bd, e.graph()).is_ok());
        prop_assert_eq!(width(&scd.bd, e.graph()).unwrap(), planar_branchwidth(&e).unwrap());
        if !has_inner_bridge(e.graph()) {
            prop_assert!(validate_sphere_cut(&scd, &e).is_ok());
        }
    }
}
