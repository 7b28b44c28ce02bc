use std::collections::BTreeSet;

use proptest::prelude::*;
use ratnest::branchdecomp::{middle_sets, validate, width};
use ratnest::fixtures;
use ratnest::graph::{Graph, VertexId};
use ratnest::oracle::{exact_bw_bruteforce, near_embedding};
use ratnest::pipeline::{
    decompose_bag, eptas_bw, parse_near_embedding, pipeline, serialize_near_embedding, Adhesion,
    AdhesionKind, Bag, BagOutcome, NearEmbeddingInput, PipelineOutcome,
};
use ratnest::ratcatcher::planar_branchwidth;
use ratnest::surface::EmbeddedGraph;
use ratnest::vortex::{LinearDecomposition, Society, SphereRendition, Vortex};
use ratnest::Error;

fn set(xs: &[VertexId]) -> BTreeSet<VertexId> {
    xs.iter().copied().collect()
}

fn plain_bag(ground: EmbeddedGraph, map: Vec<VertexId>, apex: &[VertexId]) -> Bag {
    let vertices = map.iter().chain(apex).copied().collect();
    Bag {
        vertices,
        apex: set(apex),
        rendition: SphereRendition::new(ground, Vec::new()),
        map,
        adhesions: Vec::new(),
    }
}

fn single_bag(e: &EmbeddedGraph) -> NearEmbeddingInput {
    NearEmbeddingInput {
        graph: e.graph().clone(),
        root: 0,
        tree: Vec::new(),
        bags: vec![plain_bag(e.clone(), e.graph().vertices().collect(), &[])],
    }
}

/// Wheel with hub 0 and rim `1..=rim` as the root bag (hub as apex), plus
/// a child bag hanging off the hub: a triangle `0, rim+1, rim+2`, or a
/// single edge `0, rim+1`.
fn apex_pair(rim: usize, triangle: bool) -> NearEmbeddingInput {
    let mut g = Graph::new(rim + if triangle { 3 } else { 2 }).unwrap();
    for i in 1..=rim {
        g.add_edge(0, i).unwrap();
        g.add_edge(i, i % rim + 1).unwrap();
    }
    let (x, y) = (rim + 1, rim + 2);
    g.add_edge(0, x).unwrap();
    let child = if triangle {
        g.add_edge(x, y).unwrap();
        g.add_edge(y, 0).unwrap();
        plain_bag(fixtures::cycle(3), vec![0, x, y], &[])
    } else {
        plain_bag(fixtures::path(2), vec![0, x], &[])
    };
    let mut root = plain_bag(fixtures::cycle(rim), (1..=rim).collect(), &[0]);
    root.adhesions.push(Adhesion {
        child: 1,
        vertices: set(&[0]),
        hint: Some(AdhesionKind::Apex),
    });
    NearEmbeddingInput {
        graph: g,
        root: 0,
        tree: vec![(0, 1)],
        bags: vec![root, child],
    }
}

fn expect_decomposition(
    out: PipelineOutcome,
) -> (
    ratnest::branchdecomp::BranchDecomposition,
    ratnest::pipeline::WidthLedger,
) {
    match out {
        PipelineOutcome::Decomposition { bd, ledger } => (bd, ledger),
        PipelineOutcome::LowerBound { bag, certificate } => {
            panic!("bag {bag} certified bw >= {}", certificate.value)
        }
    }
}

#[test]
fn planar_single_bag_matches_ratcatcher() {
    let e = fixtures::grid(3, 4);
    let input = single_bag(&e);
    assert!(input.validate().is_ok());
    let (bd, ledger) = expect_decomposition(pipeline(&input, 5).unwrap());
    assert_eq!(
        width(&bd, e.graph()).unwrap(),
        planar_branchwidth(&e).unwrap()
    );
    assert!(ledger.holds());
    assert_eq!(ledger.bound(), 3);
    assert!(matches!(
        pipeline(&input, 2).unwrap(),
        PipelineOutcome::LowerBound { .. }
    ));
}

#[test]
fn single_bag_decomposition_is_unchanged() {
    let e = fixtures::wheel(6);
    let input = single_bag(&e);
    let BagOutcome::Decomposition(part) = decompose_bag(&input, 0, 4).unwrap() else {
        panic!("wheel has bw 3");
    };
    let (bd, _) = expect_decomposition(pipeline(&input, 4).unwrap());
    assert_eq!(
        middle_sets(&bd, e.graph()).unwrap().len(),
        part.bd.tree_edges().len()
    );
    assert_eq!(width(&bd, e.graph()).unwrap(), part.record.width);
}

#[test]
fn apex_bag_adds_its_apex_count() {
    let input = apex_pair(6, true);
    assert!(input.validate().is_ok());
    let BagOutcome::Decomposition(root) = decompose_bag(&input, 0, 4).unwrap() else {
        panic!("cycle has bw 2");
    };
    assert_eq!(root.record.base, 2);
    assert!(root.record.width <= root.record.base + root.record.apex);
}

#[test]
fn two_bags_joined_through_the_apex() {
    let input = apex_pair(6, true);
    let (bd, ledger) = expect_decomposition(pipeline(&input, 4).unwrap());
    assert!(validate(&bd, &input.graph).is_ok());
    assert!(ledger.holds());
    // the child's three edges hang below one tree edge with middle set {hub}
    let child: BTreeSet<usize> = [(0, 7), (7, 8), (8, 0)]
        .iter()
        .map(|&(u, v)| input.graph.edge_between(u, v).unwrap())
        .collect();
    let sides = bd.edge_sides();
    let mids = middle_sets(&bd, &input.graph).unwrap();
    let m = input.graph.m();
    let cut = sides
        .iter()
        .position(|s| {
            let s: BTreeSet<usize> = s.iter().copied().collect();
            s == child || (s.len() + child.len() == m && s.is_disjoint(&child))
        })
        .expect("child edges stay together");
    assert!(mids[cut].len() <= input.bags[0].apex.len());
}

#[test]
fn three_bag_chains_with_mixed_adhesions() {
    let mut seen = 0;
    for seed in 0..400 {
        let inst = near_embedding(seed).unwrap();
        let kinds: BTreeSet<AdhesionKind> = inst.kinds.iter().map(|&(_, k)| k).collect();
        if inst.input.bags.len() < 3
            || !kinds.contains(&AdhesionKind::VortexBag)
            || !kinds.contains(&AdhesionKind::SmallCell)
        {
            continue;
        }
        seen += 1;
        let k = 64;
        let (bd, ledger) = expect_decomposition(pipeline(&inst.input, k).unwrap());
        assert!(validate(&bd, &inst.input.graph).is_ok());
        assert!(ledger.holds(), "seed {seed}: {ledger}");
        if seen == 5 {
            break;
        }
    }
    assert!(
        seen > 0,
        "no generated chain mixes vortex-bag and small-cell adhesions"
    );
}

#[test]
fn toroidal_bag_with_a_vortex() {
    let ground = fixtures::torus_grid(3);
    let face = 0;
    let walk: Vec<VertexId> = ground.faces()[face].vertices().collect();
    assert_eq!(walk.len(), 4);
    let x = 9;
    let edges = [(walk[0], x), (walk[1], x), (walk[2], x)];
    let society = Society::new(&edges, walk.clone()).unwrap();
    let bags = vec![
        set(&[walk[0], x]),
        set(&[walk[1], x]),
        set(&[walk[2], x]),
        set(&[walk[3]]),
    ];
    let vortex = Vortex {
        face,
        society,
        decomposition: LinearDecomposition {
            order: walk.clone(),
            bags,
        },
        cycle_decomposition: None,
    };
    let mut graph = ground.graph().clone();
    graph.add_vertex();
    for &(u, v) in &edges {
        graph.add_edge(u, v).unwrap();
    }
    let input = NearEmbeddingInput {
        graph,
        root: 0,
        tree: Vec::new(),
        bags: vec![Bag {
            vertices: (0..10).collect(),
            apex: BTreeSet::new(),
            rendition: SphereRendition::new(ground, vec![vortex]),
            map: (0..10).collect(),
            adhesions: Vec::new(),
        }],
    };
    assert!(input.validate().is_ok());
    let (bd, ledger) = expect_decomposition(pipeline(&input, 4).unwrap());
    assert!(validate(&bd, &input.graph).is_ok());
    assert_eq!(
        (
            ledger.bags[0].genus,
            ledger.bags[0].vortex_width,
            ledger.bags[0].breadth
        ),
        (2, 2, 1)
    );
    assert!(ledger.holds(), "{ledger}");
}

#[test]
fn misclassified_adhesion_is_rejected() {
    let mut input = apex_pair(5, true);
    input.bags[0].adhesions[0].hint = Some(AdhesionKind::VortexBag);
    assert!(input.validate().unwrap_err().contains("not of kind vortex"));
    assert!(matches!(pipeline(&input, 4), Err(Error::Input(_))));
}

#[test]
fn unsaturated_vortex_bag_is_rejected() {
    let ground = fixtures::cycle(4);
    let walk: Vec<VertexId> = ground.faces()[0].vertices().collect();
    let edges = [(walk[0], 4), (walk[2], 4)];
    let vortex = Vortex {
        face: 0,
        society: Society::new(&edges, walk.clone()).unwrap(),
        decomposition: LinearDecomposition {
            order: walk.clone(),
            bags: vec![
                set(&[walk[0], 4]),
                set(&[walk[1], 4]),
                set(&[walk[2], 4]),
                set(&[walk[3]]),
            ],
        },
        cycle_decomposition: None,
    };
    let mut graph = ground.graph().clone();
    graph.add_vertex();
    for &(u, v) in &edges {
        graph.add_edge(u, v).unwrap();
    }
    let input = NearEmbeddingInput {
        graph,
        root: 0,
        tree: Vec::new(),
        bags: vec![Bag {
            vertices: (0..5).collect(),
            apex: BTreeSet::new(),
            rendition: SphereRendition::new(ground, vec![vortex]),
            map: (0..5).collect(),
            adhesions: Vec::new(),
        }],
    };
    assert!(input.validate().unwrap_err().contains("saturated"));
}

#[test]
fn eptas_planar_is_exact() {
    let e = fixtures::grid(3, 3);
    let r = eptas_bw(&single_bag(&e), 0.5).unwrap();
    assert_eq!(r.additive, 0);
    assert_eq!(r.value, planar_branchwidth(&e).unwrap());
    assert!(!r.exact);
}

#[test]
fn eptas_returns_the_certified_value_when_c_is_small() {
    let input = apex_pair(8, true);
    let r = eptas_bw(&input, 100.0).unwrap();
    assert!(!r.exact);
    assert_eq!(r.value, r.lower_bound);
    assert!(r.lower_bound <= r.upper_bound);
    assert!(r.measured_ratio() >= 1.0);
}

#[test]
fn eptas_falls_back_to_the_oracle() {
    let input = apex_pair(4, false);
    assert!(input.graph.m() <= 10);
    let r = eptas_bw(&input, 0.01).unwrap();
    assert!(r.additive > 0);
    assert!(r.exact);
    assert_eq!(r.value, exact_bw_bruteforce(&input.graph).unwrap().exact_bw);
}

#[test]
fn eptas_refuses_large_fallbacks() {
    let e = fixtures::grid(5, 5);
    let mut graph = e.graph().clone();
    let hub = graph.add_vertex();
    for v in 0..25 {
        graph.add_edge(hub, v).unwrap();
    }
    let input = NearEmbeddingInput {
        graph,
        root: 0,
        tree: Vec::new(),
        bags: vec![plain_bag(e, (0..25).collect(), &[hub])],
    };
    assert!(input.validate().is_ok());
    assert!(matches!(
        eptas_bw(&input, 0.01),
        Err(Error::ExactFallbackExceeded(_))
    ));
    assert!(eptas_bw(&input, 0.0).is_err());
}

#[test]
fn near_embedding_text_round_trip() {
    for seed in 0..10 {
        let input = near_embedding(seed).unwrap().input;
        let text = serialize_near_embedding(&input);
        let back = parse_near_embedding(&text).unwrap();
        assert_eq!(serialize_near_embedding(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ledger_bounds_every_generated_instance(seed in any::<u64>(), k in 2usize..10) {
        let inst = near_embedding(seed).unwrap();
        match pipeline(&inst.input, k) {
            Ok(PipelineOutcome::Decomposition { bd, ledger }) => {
                prop_assert!(validate(&bd, &inst.input.graph).is_ok());
                prop_assert_eq!(width(&bd, &inst.input.graph).unwrap(), ledger.width);
                prop_assert!(ledger.holds());
            }
            Ok(PipelineOutcome::LowerBound { certificate, .. }) => {
                prop_assert_eq!(certificate.value, k);
                prop_assert!(inst.input.max_adhesion() <= k);
            }
            Err(Error::Contract(_)) => prop_assert!(inst.input.max_adhesion() > k),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
