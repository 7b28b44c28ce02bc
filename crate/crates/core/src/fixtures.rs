//! Closed-form embedded graphs used by tests, generators and the CLI.

use crate::graph::{EdgeId, Graph};
use crate::surface::{EmbeddedGraph, RotationSystem};

fn build(
    n: usize,
    edges: &[(usize, usize)],
    rotation: Vec<Vec<EdgeId>>,
    negative: &[EdgeId],
) -> EmbeddedGraph {
    let g = Graph::from_edges(n, edges).expect("fixture graph");
    let mut sign = vec![1; g.m()];
    for &e in negative {
        sign[e] = -1;
    }
    EmbeddedGraph::new(RotationSystem::new(g, rotation, sign).expect("fixture rotation"))
        .expect("fixture embedding")
}

fn one_based(rows: &[&[usize]]) -> Vec<Vec<EdgeId>> {
    rows.iter()
        .map(|r| r.iter().map(|&e| e - 1).collect())
        .collect()
}

/// Cycle `C_n` (n >= 3) drawn in the sphere.
pub fn cycle(n: usize) -> EmbeddedGraph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let rotation = (0..n).map(|i| vec![(i + n - 1) % n, i]).collect();
    build(n, &edges, rotation, &[])
}

/// Path on `n >= 2` vertices.
pub fn path(n: usize) -> EmbeddedGraph {
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    EmbeddedGraph::from_graph_order(Graph::from_edges(n, &edges).expect("path"))
}

/// Star `K_{1,k}` with centre 0.
pub fn star(k: usize) -> EmbeddedGraph {
    let edges: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
    EmbeddedGraph::from_graph_order(Graph::from_edges(k + 1, &edges).expect("star"))
}

/// `a x b` grid with vertex `(i, j)` at `i * b + j`, drawn in the plane.
pub fn grid(a: usize, b: usize) -> EmbeddedGraph {
    let id = |i: usize, j: usize| i * b + j;
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..b {
            if j + 1 < b {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < a {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    let g = Graph::from_edges(a * b, &edges).expect("grid");
    let rotation = (0..a * b)
        .map(|v| {
            let (i, j) = (v / b, v % b);
            let mut r = Vec::new();
            if j + 1 < b {
                r.push(g.edge_between(v, id(i, j + 1)).unwrap());
            }
            if i + 1 < a {
                r.push(g.edge_between(v, id(i + 1, j)).unwrap());
            }
            if j > 0 {
                r.push(g.edge_between(v, id(i, j - 1)).unwrap());
            }
            if i > 0 {
                r.push(g.edge_between(v, id(i - 1, j)).unwrap());
            }
            r
        })
        .collect();
    let sign = vec![1; g.m()];
    EmbeddedGraph::new(RotationSystem::new(g, rotation, sign).expect("grid rotation"))
        .expect("grid embedding")
}

/// Wheel with hub 0 and rim `1..=k`.
pub fn wheel(k: usize) -> EmbeddedGraph {
    let mut edges: Vec<(usize, usize)> = (1..=k).map(|i| (i, i % k + 1)).collect();
    edges.extend((1..=k).map(|i| (0, i)));
    let spoke = |i: usize| k + i - 1;
    let rim = |i: usize| i - 1; // rim edge i -- i+1
    let mut rotation = vec![(1..=k).map(spoke).collect::<Vec<_>>()];
    for i in 1..=k {
        let prev = if i == 1 { k } else { i - 1 };
        rotation.push(vec![rim(i), spoke(i), rim(prev)]);
    }
    build(k + 1, &edges, rotation, &[])
}

/// K4 drawn in the sphere.
pub fn k4() -> EmbeddedGraph {
    wheel(3)
}

/// `C_r x C_r` on the torus, vertex `(i, j)` at `i * r + j`; horizontal
/// edges first, then vertical ones.
pub fn torus_grid(r: usize) -> EmbeddedGraph {
    square_grid_on_surface(r, false)
}

/// `C_r x C_r` on the Klein bottle: the vertical wrap-around edges join
/// `(r-1, j)` to `(0, r-1-j)` and carry sign `-1`.
pub fn klein_grid(r: usize) -> EmbeddedGraph {
    square_grid_on_surface(r, true)
}

fn square_grid_on_surface(r: usize, twisted: bool) -> EmbeddedGraph {
    let id = |i: usize, j: usize| i * r + j;
    let mut edges = Vec::new();
    for i in 0..r {
        for j in 0..r {
            edges.push((id(i, j), id(i, (j + 1) % r)));
        }
    }
    let mut negative = Vec::new();
    for i in 0..r {
        for j in 0..r {
            if i + 1 < r {
                edges.push((id(i, j), id(i + 1, j)));
            } else if twisted {
                negative.push(edges.len());
                edges.push((id(i, j), id(0, r - 1 - j)));
            } else {
                edges.push((id(i, j), id(0, j)));
            }
        }
    }
    let h = |i: usize, j: usize| id(i, j);
    let v = |i: usize, j: usize| r * r + id(i, j);
    let rotation = (0..r * r)
        .map(|x| {
            let (i, j) = (x / r, x % r);
            let east = h(i, j);
            let west = h(i, (j + r - 1) % r);
            let south = v(i, j);
            let north = if i > 0 {
                v(i - 1, j)
            } else if twisted {
                v(r - 1, r - 1 - j)
            } else {
                v(r - 1, j)
            };
            vec![east, south, west, north]
        })
        .collect();
    build(r * r, &edges, rotation, &negative)
}

/// K3,3 on the torus with three hexagonal faces.
pub fn k33_torus() -> EmbeddedGraph {
    let edges: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
    let rotation = one_based(&[
        &[1, 2, 3],
        &[4, 5, 6],
        &[7, 8, 9],
        &[1, 4, 7],
        &[2, 5, 8],
        &[3, 6, 9],
    ]);
    build(6, &edges, rotation, &[])
}

fn complete_edges(t: usize) -> Vec<(usize, usize)> {
    (0..t)
        .flat_map(|a| (a + 1..t).map(move |b| (a, b)))
        .collect()
}

/// K5 in the projective plane (Euler genus 1).
pub fn k5_projective() -> EmbeddedGraph {
    let rotation = one_based(&[
        &[1, 2, 3, 4],
        &[1, 5, 6, 7],
        &[2, 9, 5, 8],
        &[3, 8, 6, 10],
        &[4, 10, 7, 9],
    ]);
    build(5, &complete_edges(5), rotation, &[4, 5, 6, 8])
}

/// K7 triangulating the torus: vertex `i` sees `i+1, i+3, i+2, i+6, i+4, i+5`.
pub fn k7_torus() -> EmbeddedGraph {
    let edges = complete_edges(7);
    let g = Graph::from_edges(7, &edges).expect("K7");
    let rotation = (0..7)
        .map(|i| {
            [1, 3, 2, 6, 4, 5]
                .iter()
                .map(|&k| g.edge_between(i, (i + k) % 7).unwrap())
                .collect()
        })
        .collect();
    build(7, &edges, rotation, &[])
}
