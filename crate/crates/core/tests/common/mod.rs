#![allow(dead_code)]

use std::collections::HashMap;

use petgraph::algo::is_isomorphic;
use petgraph::graph::UnGraph;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratnest::graph::Graph;
use ratnest::surface::{planar_embed, EmbeddedGraph, PlanarEmbedding, RotationSystem};

pub fn to_petgraph(g: &Graph) -> UnGraph<(), ()> {
    let mut p = UnGraph::new_undirected();
    let nodes: Vec<_> = (0..g.n()).map(|_| p.add_node(())).collect();
    for &(u, v) in g.edges() {
        p.add_edge(nodes[u], nodes[v], ());
    }
    p
}

fn invariant(g: &Graph) -> (usize, Vec<(usize, Vec<usize>)>) {
    let mut profile: Vec<(usize, Vec<usize>)> = g
        .vertices()
        .map(|v| {
            let mut nd: Vec<usize> = g.incident(v).iter().map(|&(w, _)| g.degree(w)).collect();
            nd.sort_unstable();
            (g.degree(v), nd)
        })
        .collect();
    profile.sort();
    (g.n(), profile)
}

/// All connected graphs with `1..=max_m` edges, one per isomorphism class,
/// grown edge by edge: every connected graph loses an edge (a non-bridge, or
/// a pendant edge with its leaf) and stays connected.
pub fn connected_graphs(max_m: usize) -> Vec<Graph> {
    type Key = (usize, Vec<(usize, Vec<usize>)>);
    type Bucket = Vec<(Graph, UnGraph<(), ()>)>;
    let mut level = vec![Graph::from_edges(2, &[(0, 1)]).unwrap()];
    let mut all = level.clone();
    for _ in 2..=max_m {
        let mut buckets: HashMap<Key, Bucket> = HashMap::new();
        let mut next = Vec::new();
        let mut offer = |h: Graph, next: &mut Vec<Graph>| {
            let bucket = buckets.entry(invariant(&h)).or_default();
            let p = to_petgraph(&h);
            if bucket.iter().all(|(_, q)| !is_isomorphic(q, &p)) {
                bucket.push((h.clone(), p));
                next.push(h);
            }
        };
        for g in &level {
            for u in g.vertices() {
                for v in u + 1..g.n() {
                    if g.edge_between(u, v).is_none() {
                        let mut h = g.clone();
                        h.add_edge(u, v).unwrap();
                        offer(h, &mut next);
                    }
                }
                let mut h = g.clone();
                let w = h.add_vertex();
                h.add_edge(u, w).unwrap();
                offer(h, &mut next);
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

pub fn embed(g: &Graph) -> Option<EmbeddedGraph> {
    match planar_embed(g) {
        PlanarEmbedding::Planar(rot) => Some(EmbeddedGraph::new(rot).unwrap()),
        PlanarEmbedding::NonPlanar => None,
    }
}

/// Connected planar graphs with at most `max_m` edges, up to isomorphism.
pub fn planar_corpus(max_m: usize) -> Vec<EmbeddedGraph> {
    connected_graphs(max_m).iter().filter_map(embed).collect()
}

/// Simple graph on `2..=max_n` vertices from a random edge mask.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .zip(mask)
                .filter(|(_, keep)| *keep)
                .map(|(&p, _)| p)
                .collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// Graph with at least one edge and at most `max_m` edges.
pub fn arb_small_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = Graph> {
    arb_graph(max_n).prop_filter("edge count", move |g| g.m() >= 1 && g.m() <= max_m)
}

/// Connected graph with a random signed rotation system.
pub fn random_embedding(seed: u64, max_n: usize, extra: usize) -> EmbeddedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_n);
    let mut g = Graph::new(n).unwrap();
    for v in 1..n {
        g.add_edge(rng.gen_range(0..v), v).unwrap();
    }
    for _ in 0..rng.gen_range(0..=extra) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && g.edge_between(u, v).is_none() {
            g.add_edge(u, v).unwrap();
        }
    }
    let rotation = g
        .vertices()
        .map(|v| {
            let mut es: Vec<usize> = g.incident(v).iter().map(|&(_, e)| e).collect();
            es.shuffle(&mut rng);
            es
        })
        .collect();
    let twist = rng.gen_bool(0.3);
    let sign = (0..g.m())
        .map(|_| if twist && rng.gen_bool(0.3) { -1 } else { 1 })
        .collect();
    EmbeddedGraph::new(RotationSystem::new(g, rotation, sign).unwrap()).unwrap()
}
