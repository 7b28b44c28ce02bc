//! Planarity testing with embedding construction by path addition over
//! fragments, one block at a time.

use std::collections::VecDeque;

use super::{EmbeddedGraph, RotationSystem};
use crate::graph::{blocks, EdgeId, Graph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanarEmbedding {
    Planar(RotationSystem),
    NonPlanar,
}

impl PlanarEmbedding {
    pub fn is_planar(&self) -> bool {
        matches!(self, PlanarEmbedding::Planar(_))
    }
}

/// Genus-0 rotation system for `g`, or `NonPlanar`.
pub fn planar_embed(g: &Graph) -> PlanarEmbedding {
    let forest = blocks(g);
    let mut rotation: Vec<Vec<EdgeId>> = vec![Vec::new(); g.n()];
    for edges in &forest.block_edges {
        if edges.is_empty() {
            continue;
        }
        let Some(local) = embed_block(g, edges) else {
            return PlanarEmbedding::NonPlanar;
        };
        // blocks meet at cut vertices; concatenated rotations nest them
        for (v, r) in local {
            rotation[v].extend(r);
        }
    }
    let rot = RotationSystem::new(g.clone(), rotation, vec![1; g.m()])
        .expect("block rotations cover every edge");
    debug_assert_eq!(
        EmbeddedGraph::new(rot.clone()).map(|e| e.genus()).ok(),
        Some(0)
    );
    PlanarEmbedding::Planar(rot)
}

/// Rotation (per touched vertex) of one 2-connected block.
fn embed_block(g: &Graph, edges: &[EdgeId]) -> Option<Vec<(VertexId, Vec<EdgeId>)>> {
    if edges.len() == 1 {
        let (u, v) = g.endpoints(edges[0]);
        return Some(vec![(u, vec![edges[0]]), (v, vec![edges[0]])]);
    }
    let n = g.n();
    let mut in_block = vec![false; g.m()];
    for &e in edges {
        in_block[e] = true;
    }
    let adj: Vec<Vec<(VertexId, EdgeId)>> = (0..n)
        .map(|v| {
            g.incident(v)
                .iter()
                .copied()
                .filter(|&(_, e)| in_block[e])
                .collect()
        })
        .collect();

    let cycle = find_cycle(&adj, g.endpoints(edges[0]).0);
    let mut placed_v = vec![false; n];
    let mut placed_e = vec![false; g.m()];
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        placed_v[a] = true;
        placed_e[g.edge_between(a, b).expect("cycle edge")] = true;
    }
    let mut rev = cycle.clone();
    rev.reverse();
    let mut faces: Vec<Vec<VertexId>> = vec![cycle, rev];
    let mut remaining = edges.iter().filter(|&&e| !placed_e[e]).count();

    while remaining > 0 {
        let frags = fragments(g, &adj, edges, &placed_v, &placed_e);
        let mut choice: Option<(usize, usize)> = None;
        for (fi, frag) in frags.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&f| frag.attachments.iter().all(|a| faces[f].contains(a)))
                .collect();
            match admissible.len() {
                0 => return None,
                1 => {
                    choice = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, f) = choice.expect("some fragment remains");
        let path = fragment_path(&adj, &frags[fi], &placed_v);
        for w in path.windows(2) {
            let e = g.edge_between(w[0], w[1]).expect("path edge");
            placed_e[e] = true;
            remaining -= 1;
        }
        for &v in &path {
            placed_v[v] = true;
        }
        let face = faces.swap_remove(f);
        let (a, b) = (path[0], *path.last().unwrap());
        let ia = face
            .iter()
            .position(|&x| x == a)
            .expect("attachment on face");
        let ib = face
            .iter()
            .position(|&x| x == b)
            .expect("attachment on face");
        let k = face.len();
        let arc = |from: usize, to: usize| {
            let mut xs = Vec::new();
            let mut j = from;
            loop {
                xs.push(face[j]);
                if j == to {
                    break;
                }
                j = (j + 1) % k;
            }
            xs
        };
        let inner = &path[1..path.len() - 1];
        let mut f1 = arc(ia, ib);
        f1.extend(inner.iter().rev());
        let mut f2 = arc(ib, ia);
        f2.extend(inner.iter());
        faces.push(f1);
        faces.push(f2);
    }
    Some(rotation_from_faces(g, &faces))
}

fn find_cycle(adj: &[Vec<(VertexId, EdgeId)>], start: VertexId) -> Vec<VertexId> {
    // depth-first search until a back edge closes a cycle
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut stack = vec![(start, usize::MAX)];
    while let Some((v, pe)) = stack.pop() {
        if depth[v] != usize::MAX {
            continue;
        }
        depth[v] = if pe == usize::MAX {
            0
        } else {
            depth[parent[v]] + 1
        };
        for &(w, e) in &adj[v] {
            if e == pe {
                continue;
            }
            if depth[w] != usize::MAX && w != parent[v] {
                let mut cyc = vec![v];
                let mut x = v;
                while x != w {
                    x = parent[x];
                    cyc.push(x);
                }
                return cyc;
            }
            if depth[w] == usize::MAX {
                parent[w] = v;
                stack.push((w, e));
            }
        }
    }
    unreachable!("a block with two or more edges contains a cycle")
}

struct Fragment {
    /// interior vertices (empty for a single chord)
    inner: Vec<VertexId>,
    attachments: Vec<VertexId>,
    chord: Option<EdgeId>,
}

fn fragments(
    g: &Graph,
    adj: &[Vec<(VertexId, EdgeId)>],
    edges: &[EdgeId],
    placed_v: &[bool],
    placed_e: &[bool],
) -> Vec<Fragment> {
    let mut out = Vec::new();
    for &e in edges {
        let (u, v) = g.endpoints(e);
        if !placed_e[e] && placed_v[u] && placed_v[v] {
            out.push(Fragment {
                inner: Vec::new(),
                attachments: vec![u.min(v), u.max(v)],
                chord: Some(e),
            });
        }
    }
    let n = adj.len();
    let mut seen = vec![false; n];
    for s in 0..n {
        if placed_v[s] || seen[s] || adj[s].is_empty() {
            continue;
        }
        let mut inner = Vec::new();
        let mut att = Vec::new();
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            inner.push(v);
            for &(w, _) in &adj[v] {
                if placed_v[w] {
                    att.push(w);
                } else if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        att.sort_unstable();
        att.dedup();
        out.push(Fragment {
            inner,
            attachments: att,
            chord: None,
        });
    }
    out
}

/// A path through the fragment joining two distinct attachments.
fn fragment_path(
    adj: &[Vec<(VertexId, EdgeId)>],
    frag: &Fragment,
    placed_v: &[bool],
) -> Vec<VertexId> {
    if frag.chord.is_some() {
        return frag.attachments.clone();
    }
    let a = frag.attachments[0];
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &(w, _) in &adj[a] {
        if !placed_v[w] && frag.inner.contains(&w) && parent[w] == usize::MAX {
            parent[w] = a;
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &adj[v] {
            if placed_v[w] && w != a {
                let mut path = vec![w, v];
                let mut x = v;
                while parent[x] != a {
                    x = parent[x];
                    path.push(x);
                }
                path.push(a);
                path.reverse();
                return path;
            }
            if !placed_v[w] && parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    unreachable!("fragments of a block have two attachments")
}

/// Consistently oriented facial cycles to rotations: a walk `u -> v -> w`
/// makes edge `vw` follow `vu` at `v`.
fn rotation_from_faces(g: &Graph, faces: &[Vec<VertexId>]) -> Vec<(VertexId, Vec<EdgeId>)> {
    let mut succ: std::collections::HashMap<(VertexId, EdgeId), EdgeId> =
        std::collections::HashMap::new();
    let mut touched = std::collections::BTreeSet::new();
    for f in faces {
        let k = f.len();
        for i in 0..k {
            let (u, v, w) = (f[i], f[(i + 1) % k], f[(i + 2) % k]);
            let back = g.edge_between(v, u).expect("face edge");
            let fwd = g.edge_between(v, w).expect("face edge");
            succ.insert((v, back), fwd);
            touched.insert(v);
        }
    }
    touched
        .into_iter()
        .map(|v| {
            let first = *succ
                .keys()
                .filter(|&&(x, _)| x == v)
                .map(|(_, e)| e)
                .min()
                .expect("touched vertex");
            let mut r = vec![first];
            let mut e = succ[&(v, first)];
            while e != first {
                r.push(e);
                e = succ[&(v, e)];
            }
            (v, r)
        })
        .collect()
}
