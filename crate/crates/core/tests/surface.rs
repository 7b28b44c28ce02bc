mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use ratnest::fixtures;
use ratnest::graph::Graph;
use ratnest::oracle::exhaustive_representativity;
use ratnest::surface::{
    cut_along_noose, embedding_genus, is_contractible, parse_embedding, planar_embed, radial_graph,
    serialize_embedding, shortest_noncontractible_noose, trace_faces, EmbeddedGraph, Noose,
    PlanarEmbedding, Representativity,
};

/// Noose through column 0 of the `r x r` torus grid.
fn meridian(e: &EmbeddedGraph, r: usize) -> Noose {
    let vertices: Vec<usize> = (0..r).map(|i| i * r).collect();
    let faces = (0..r)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % r]);
            (0..e.faces().len())
                .find(|&f| {
                    let vs: BTreeSet<usize> = e.faces()[f].vertices().collect();
                    [a, b, a + 1, b + 1].iter().all(|x| vs.contains(x))
                })
                .unwrap()
        })
        .collect();
    Noose::new(vertices, faces)
}

#[test]
fn face_counts() {
    let tri = fixtures::cycle(3);
    assert_eq!(trace_faces(tri.rotation()).len(), 2);
    assert_eq!(trace_faces(fixtures::path(2).rotation()).len(), 1);
    // K3,3 fixture rotation traced by hand: three hexagons
    let k33 = fixtures::k33_torus();
    let faces = trace_faces(k33.rotation());
    assert_eq!(faces.len(), 3);
    assert!(faces.iter().all(|f| f.len() == 6));
}

#[test]
fn fixture_genera() {
    assert_eq!(embedding_genus(&fixtures::cycle(3)), 0);
    assert_eq!(embedding_genus(&fixtures::k5_projective()), 1);
    assert_eq!(embedding_genus(&fixtures::k7_torus()), 2);
    assert_eq!(embedding_genus(&fixtures::torus_grid(3)), 2);
    assert_eq!(embedding_genus(&fixtures::klein_grid(3)), 2);
    assert!(!fixtures::klein_grid(3).rotation().is_orientable());
}

#[test]
fn radial_counts() {
    let r = radial_graph(&fixtures::cycle(3)).unwrap();
    assert_eq!((r.vertex_count, r.face_count), (3, 2));
    assert_eq!(r.embedding.graph().m(), 6);
    let r = radial_graph(&fixtures::path(2)).unwrap();
    assert_eq!(
        (r.vertex_count, r.face_count, r.embedding.graph().m()),
        (2, 1, 2)
    );
    let r = radial_graph(&fixtures::torus_grid(3)).unwrap();
    assert_eq!((r.vertex_count, r.face_count), (9, 9));
}

#[test]
fn contractibility_examples() {
    let t = fixtures::torus_grid(3);
    assert!(!is_contractible(&t, &meridian(&t, 3)));
    let sphere = fixtures::grid(3, 3);
    let outer = (0..sphere.faces().len())
        .max_by_key(|&f| sphere.faces()[f].len())
        .unwrap();
    let inner = (0..sphere.faces().len()).find(|&f| {
        let vs: BTreeSet<usize> = sphere.faces()[f].vertices().collect();
        vs.contains(&0) && vs.contains(&4)
    });
    let noose = Noose::new(vec![0, 4], vec![inner.unwrap(), outer]);
    if noose.check(&sphere).is_ok() {
        assert!(is_contractible(&sphere, &noose));
    }
}

#[test]
fn representativity_examples() {
    assert_eq!(
        shortest_noncontractible_noose(&fixtures::wheel(5)),
        Representativity::Infinite
    );
    assert_eq!(
        shortest_noncontractible_noose(&fixtures::torus_grid(3)).length(),
        Some(3)
    );
    assert_eq!(
        shortest_noncontractible_noose(&fixtures::torus_grid(4)).length(),
        Some(4)
    );
}

#[test]
fn cutting_examples() {
    let t3 = fixtures::torus_grid(3);
    let pieces = cut_along_noose(&t3, &meridian(&t3, 3)).unwrap();
    assert_eq!(pieces.len(), 1);
    assert_eq!(pieces[0].embedding.genus(), 0);

    let t4 = fixtures::torus_grid(4);
    let pieces = cut_along_noose(&t4, &meridian(&t4, 4)).unwrap();
    assert!(!pieces.is_empty());
    assert!(pieces.iter().all(|p| p.embedding.genus() == 0));

    // K5 on the projective plane: a noose through all five vertices
    let k5 = fixtures::k5_projective();
    if let Representativity::Finite { noose, .. } = shortest_noncontractible_noose(&k5) {
        let pieces = cut_along_noose(&k5, &noose).unwrap();
        let left: usize = pieces.iter().map(|p| p.embedding.graph().n()).sum();
        assert_eq!(left + noose.len(), 5);
    }
}

#[test]
fn planarity_examples() {
    let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    match planar_embed(&k4) {
        PlanarEmbedding::Planar(rot) => assert_eq!(EmbeddedGraph::new(rot).unwrap().genus(), 0),
        PlanarEmbedding::NonPlanar => panic!("K4 is planar"),
    }
    let k5_edges: Vec<(usize, usize)> = (0..5)
        .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
        .collect();
    assert!(!planar_embed(&Graph::from_edges(5, &k5_edges).unwrap()).is_planar());
    assert!(planar_embed(fixtures::grid(3, 3).graph()).is_planar());
}

#[test]
fn embedding_text_round_trip() {
    for e in [
        fixtures::klein_grid(3),
        fixtures::k7_torus(),
        fixtures::wheel(4),
    ] {
        let text = serialize_embedding(&e);
        let back = parse_embedding(&text).unwrap();
        assert_eq!(serialize_embedding(&back), text);
        assert_eq!(back.genus(), e.genus());
    }
}

/// Kuratowski oracle: some contraction of `g` contains K5 or K3,3 as a
/// subgraph.
fn has_kuratowski_minor(g: &Graph) -> bool {
    fn key(n: usize, edges: &BTreeSet<(usize, usize)>) -> (usize, Vec<(usize, usize)>) {
        (n, edges.iter().copied().collect())
    }
    fn contains_k5_or_k33(n: usize, adj: &[Vec<bool>]) -> bool {
        let verts: Vec<usize> = (0..n)
            .filter(|&v| adj[v].iter().filter(|&&x| x).count() >= 3)
            .collect();
        let pick = |k: usize| -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut cur = Vec::new();
            fn rec(
                i: usize,
                k: usize,
                vs: &[usize],
                cur: &mut Vec<usize>,
                out: &mut Vec<Vec<usize>>,
            ) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                if i == vs.len() {
                    return;
                }
                cur.push(vs[i]);
                rec(i + 1, k, vs, cur, out);
                cur.pop();
                rec(i + 1, k, vs, cur, out);
            }
            rec(0, k, &verts, &mut cur, &mut out);
            out
        };
        for s in pick(5) {
            if s.iter().all(|&a| s.iter().all(|&b| a == b || adj[a][b])) {
                return true;
            }
        }
        for s in pick(6) {
            for mask in 0u32..64 {
                if mask.count_ones() != 3 || mask & 1 == 0 {
                    continue;
                }
                let (a, b): (Vec<usize>, Vec<usize>) = (0..6).partition(|&i| mask >> i & 1 == 1);
                if a.iter().all(|&i| b.iter().all(|&j| adj[s[i]][s[j]])) {
                    return true;
                }
            }
        }
        false
    }
    fn search(
        n: usize,
        edges: BTreeSet<(usize, usize)>,
        seen: &mut HashSet<(usize, Vec<(usize, usize)>)>,
    ) -> bool {
        if n < 5 || edges.len() < 9 || !seen.insert(key(n, &edges)) {
            return false;
        }
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in &edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        if contains_k5_or_k33(n, &adj) {
            return true;
        }
        for &(u, v) in &edges {
            // contract v into u, then shift ids above v down
            let relabel = |x: usize| {
                let x = if x == v { u } else { x };
                if x > v {
                    x - 1
                } else {
                    x
                }
            };
            let merged: BTreeSet<(usize, usize)> = edges
                .iter()
                .map(|&(a, b)| (relabel(a), relabel(b)))
                .filter(|&(a, b)| a != b)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            if search(n - 1, merged, seen) {
                return true;
            }
        }
        false
    }
    let edges: BTreeSet<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    search(g.n(), edges, &mut HashSet::new())
}

#[test]
fn kuratowski_oracle_sanity() {
    let k5: Vec<(usize, usize)> = (0..5)
        .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
        .collect();
    assert!(has_kuratowski_minor(&Graph::from_edges(5, &k5).unwrap()));
    assert!(has_kuratowski_minor(fixtures::k33_torus().graph()));
    assert!(!has_kuratowski_minor(fixtures::grid(3, 3).graph()));
    // Petersen graph
    let petersen = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 4),
        (4, 0),
        (0, 5),
        (1, 6),
        (2, 7),
        (3, 8),
        (4, 9),
        (5, 7),
        (7, 9),
        (9, 6),
        (6, 8),
        (8, 5),
    ];
    assert!(has_kuratowski_minor(
        &Graph::from_edges(10, &petersen).unwrap()
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_formula_per_component(seed in any::<u64>()) {
        let e = common::random_embedding(seed, 9, 8);
        let g = e.graph();
        let f = e.faces().len() as i64;
        let chi = g.n() as i64 - g.m() as i64 + f;
        prop_assert_eq!(chi, 2 - e.genus() as i64);
        let sides: usize = e.faces().iter().map(|f| f.len()).sum();
        prop_assert_eq!(sides, 2 * g.m());
    }

    #[test]
    fn shortest_noose_matches_exhaustive_oracle(seed in any::<u64>()) {
        let e = common::random_embedding(seed, 7, 6);
        prop_assume!(e.graph().n() + e.faces().len() <= 30);
        let fast = shortest_noncontractible_noose(&e);
        let slow = exhaustive_representativity(&e).unwrap();
        prop_assert_eq!(fast.length(), slow);
        if let Representativity::Finite { noose, length } = fast {
            prop_assert_eq!(noose.len(), length);
            prop_assert!(noose.check(&e).is_ok());
            prop_assert!(!is_contractible(&e, &noose));
        }
    }

    #[test]
    fn cutting_lowers_every_component_genus(seed in any::<u64>()) {
        let e = common::random_embedding(seed, 8, 8);
        if let Representativity::Finite { noose, .. } = shortest_noncontractible_noose(&e) {
            let pieces = cut_along_noose(&e, &noose).unwrap();
            let gone = noose.vertex_set();
            let mut covered = BTreeSet::new();
            for p in &pieces {
                prop_assert!(p.embedding.genus() < e.genus());
                for &v in &p.map.vertex_map {
                    prop_assert!(!gone.contains(&v));
                    prop_assert!(covered.insert(v));
                }
            }
            prop_assert_eq!(covered.len() + gone.len(), e.graph().n());
        }
    }

    #[test]
    fn planarity_matches_kuratowski(g in common::arb_graph(7)) {
        let planar = match planar_embed(&g) {
            PlanarEmbedding::Planar(rot) => {
                prop_assert_eq!(EmbeddedGraph::new(rot).unwrap().genus(), 0);
                true
            }
            PlanarEmbedding::NonPlanar => false,
        };
        prop_assert_eq!(planar, !has_kuratowski_minor(&g));
    }
}
