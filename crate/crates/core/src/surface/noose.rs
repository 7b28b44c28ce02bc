use std::collections::{BTreeSet, VecDeque};

use super::map::Map;
use super::{planar_embed, EmbeddedGraph, PlanarEmbedding};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Subgraph, VertexId};

/// Closed curve meeting the embedding only in vertices: `v0 f0 v1 f1 ...`
/// with `f_i` incident to both `v_i` and `v_{i+1}`. `corners[i]` optionally
/// pins the positions of `v_i` and `v_{i+1}` on the walk of `f_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Noose {
    pub vertices: Vec<VertexId>,
    pub faces: Vec<usize>,
    pub corners: Option<Vec<(usize, usize)>>,
}

impl Noose {
    pub fn new(vertices: Vec<VertexId>, faces: Vec<usize>) -> Self {
        Noose {
            vertices,
            faces,
            corners: None,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().collect()
    }

    /// Checks alternation, incidences, and that vertices and faces are
    /// pairwise distinct.
    pub fn check(&self, e: &EmbeddedGraph) -> crate::Diagnostic {
        let l = self.vertices.len();
        if l == 0 || self.faces.len() != l {
            return Err("noose must alternate vertices and faces".into());
        }
        let vs: BTreeSet<_> = self.vertices.iter().collect();
        if vs.len() != l {
            return Err("noose repeats a vertex".into());
        }
        let fs: BTreeSet<_> = self.faces.iter().collect();
        if fs.len() != l {
            return Err("noose crosses a face twice".into());
        }
        for i in 0..l {
            let f = self.faces[i];
            if f >= e.faces().len() || self.vertices[i] >= e.graph().n() {
                return Err("noose refers to an unknown vertex or face".into());
            }
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % l]);
            let face = &e.faces()[f];
            if let Some(c) = &self.corners {
                let (p, q) = c[i];
                if p >= face.len()
                    || q >= face.len()
                    || face.sides[p].vertex != a
                    || face.sides[q].vertex != b
                {
                    return Err(format!("corner positions do not match face {}", f + 1));
                }
            } else if !face.vertices().any(|v| v == a) || !face.vertices().any(|v| v == b) {
                return Err(format!(
                    "face {} is not incident to its noose vertices",
                    f + 1
                ));
            }
        }
        Ok(())
    }

    fn corner_positions(&self, e: &EmbeddedGraph) -> Vec<(usize, usize)> {
        if let Some(c) = &self.corners {
            return c.clone();
        }
        let l = self.vertices.len();
        (0..l)
            .map(|i| {
                let face = &e.faces()[self.faces[i]];
                let first = |x: VertexId| face.vertices().position(|v| v == x).expect("incident");
                (first(self.vertices[i]), first(self.vertices[(i + 1) % l]))
            })
            .collect()
    }
}

/// Result of a representativity search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Representativity {
    Infinite,
    Finite { noose: Noose, length: usize },
}

impl Representativity {
    pub fn length(&self) -> Option<usize> {
        match self {
            Representativity::Infinite => None,
            Representativity::Finite { length, .. } => Some(*length),
        }
    }
}

/// Draw the noose as a cycle of chords, cut the surface along it and cap
/// both holes. The noose is contractible iff the cut separates and one
/// side is a sphere.
pub fn is_contractible(e: &EmbeddedGraph, noose: &Noose) -> bool {
    if let Err(msg) = noose.check(e) {
        panic!("is_contractible needs a valid noose: {msg}");
    }
    let corners = noose.corner_positions(e);
    let l = noose.len();
    if l == 1 && corners[0].0 == corners[0].1 {
        return true;
    }
    let mut map = e.map();
    let m0 = map.m();
    for i in 0..l {
        let face = &e.faces()[noose.faces[i]];
        let (p, q) = corners[i];
        map.insert_chord(face.sides[p].side, face.sides[q].side);
    }
    let chord = |i: usize| m0 + i;
    let twist: i8 = (0..l).map(|i| map.sign[chord(i)]).product();
    if twist < 0 {
        return false;
    }

    let n = map.n();
    let m = map.m();
    // side[d] = 1 when dart d ends up at the right-hand copy of its tail
    let mut right = vec![false; 2 * m];
    let mut orient = 1i8;
    for i in 0..l {
        let v = noose.vertices[i];
        let into = 2 * chord((i + l - 1) % l) + 1;
        let out = 2 * chord(i);
        let r = &map.rot[v];
        let k = r.len();
        let (ia, ib) = (map.pos[into], map.pos[out]);
        // succ-order interval from `from` to `to`, inclusive
        let interval = |from: usize, to: usize| {
            let mut xs = Vec::new();
            let mut j = from;
            loop {
                xs.push(r[j]);
                if j == to {
                    break;
                }
                j = (j + 1) % k;
            }
            xs
        };
        let right_side = if orient > 0 {
            interval(ia, ib)
        } else {
            interval(ib, ia)
        };
        for d in right_side {
            if d != into && d != out {
                right[d] = true;
            }
        }
        orient *= map.sign[chord(i)];
    }

    // New map: copies of noose vertices on the right get ids n + i;
    // chords become left copies (same id) and right copies (id m + i).
    let mut copy = vec![usize::MAX; n];
    for (i, &v) in noose.vertices.iter().enumerate() {
        copy[v] = n + i;
    }
    let total_edges = m + l;
    let mut tail = vec![0usize; 2 * total_edges];
    for d in 0..2 * m {
        let t = map.tail[d];
        tail[d] = if right[d] { copy[t] } else { t };
    }
    for i in 0..l {
        let (a, b) = (noose.vertices[i], noose.vertices[(i + 1) % l]);
        tail[2 * (m + i)] = copy[a];
        tail[2 * (m + i) + 1] = copy[b];
    }
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n + l];
    for v in 0..n {
        if copy[v] == usize::MAX {
            rot[v] = map.rot[v].clone();
        }
    }
    orient = 1;
    for i in 0..l {
        let v = noose.vertices[i];
        let prev = (i + l - 1) % l;
        let into = 2 * chord(prev) + 1;
        let out = 2 * chord(i);
        let r = &map.rot[v];
        let k = r.len();
        let start = map.pos[out];
        let mut left = Vec::new();
        let mut rightv = Vec::new();
        for step in 0..k {
            let d = r[(start + step) % k];
            if d == out {
                left.push(out);
                rightv.push(2 * (m + i));
            } else if d == into {
                left.push(into);
                rightv.push(2 * (m + prev) + 1);
            } else if right[d] {
                rightv.push(d);
            } else {
                left.push(d);
            }
        }
        rot[v] = left;
        rot[copy[v]] = rightv;
        orient *= map.sign[chord(i)];
    }
    let _ = orient;
    let mut sign = map.sign.clone();
    for i in 0..l {
        sign.push(map.sign[chord(i)]);
    }
    let mut cut = Map {
        tail,
        sign,
        rot,
        pos: Vec::new(),
    };
    cut.reindex();

    let faces = cut.faces();
    let (comp, count) = cut.components();
    let (_, before) = map.components();
    if count != before + 1 {
        return false;
    }
    let genus = cut.component_genus(&faces);
    let left_comp = comp[noose.vertices[0]];
    let right_comp = comp[copy[noose.vertices[0]]];
    genus[left_comp] == 0 || genus[right_comp] == 0
}

/// The vertex/face incidence multigraph: one edge per corner.
#[derive(Clone, Debug)]
pub(crate) struct CornerGraph {
    pub n: usize,
    /// corner -> (vertex, face, position of the corner on the face walk)
    pub corners: Vec<(VertexId, usize, usize)>,
    /// node -> incident corners; vertex nodes are `0..n`, face `f` is `n + f`
    pub adj: Vec<Vec<usize>>,
    /// corner -> the two edges of the graph it lies between
    pub between: Vec<(EdgeId, EdgeId)>,
    /// edge of the graph -> corners next to it
    pub around: Vec<Vec<usize>>,
}

impl CornerGraph {
    pub fn new(e: &EmbeddedGraph) -> Self {
        let n = e.graph().n();
        let mut corners = Vec::new();
        let mut adj = vec![Vec::new(); n + e.faces().len()];
        let mut between = Vec::new();
        let mut around = vec![Vec::new(); e.graph().m()];
        for (f, face) in e.faces().iter().enumerate() {
            let len = face.sides.len();
            for (p, s) in face.sides.iter().enumerate() {
                let c = corners.len();
                corners.push((s.vertex, f, p));
                adj[s.vertex].push(c);
                adj[n + f].push(c);
                let before = face.sides[(p + len - 1) % len].edge;
                between.push((before, s.edge));
                around[before].push(c);
                if before != s.edge {
                    around[s.edge].push(c);
                }
            }
        }
        CornerGraph {
            n,
            corners,
            adj,
            between,
            around,
        }
    }

    /// Whether a simple closed corner walk bounds a disk. The edges of the
    /// graph are the cells of the corner graph; the walk bounds a disk iff
    /// it splits the cells into two sides and one side has Euler
    /// characteristic 1.
    pub fn bounds_disk(&self, cycle: &[usize]) -> bool {
        let cells = self.around.len();
        if cells == 0 {
            return true;
        }
        let mut cut = vec![false; self.corners.len()];
        for &c in cycle {
            cut[c] = true;
        }
        let mut side = vec![false; cells];
        let start = self.between[cycle[0]].0;
        side[start] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for &c in &self.around[x] {
                if cut[c] {
                    continue;
                }
                let (a, b) = self.between[c];
                let y = if a == x { b } else { a };
                if !side[y] {
                    side[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached == cells {
            return false;
        }
        let mut corner_seen = vec![false; self.corners.len()];
        let mut node_seen = vec![false; self.nodes()];
        [true, false].into_iter().any(|which| {
            corner_seen.iter_mut().for_each(|x| *x = false);
            node_seen.iter_mut().for_each(|x| *x = false);
            let (mut faces, mut edges, mut nodes) = (0i64, 0i64, 0i64);
            for x in (0..cells).filter(|&x| side[x] == which) {
                faces += 1;
                for &c in &self.around[x] {
                    if corner_seen[c] {
                        continue;
                    }
                    corner_seen[c] = true;
                    edges += 1;
                    let (v, f, _) = self.corners[c];
                    for node in [v, self.n + f] {
                        if !node_seen[node] {
                            node_seen[node] = true;
                            nodes += 1;
                        }
                    }
                }
            }
            nodes - edges + faces == 1
        })
    }

    pub fn other(&self, c: usize, node: usize) -> usize {
        let (v, f, _) = self.corners[c];
        if node == v {
            self.n + f
        } else {
            v
        }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    fn bfs(&self, root: usize, allowed: impl Fn(usize) -> bool) -> (Vec<usize>, Vec<usize>) {
        let mut dist = vec![usize::MAX; self.nodes()];
        let mut parent = vec![usize::MAX; self.nodes()];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &c in &self.adj[x] {
                let y = self.other(c, x);
                if dist[y] == usize::MAX && allowed(y) {
                    dist[y] = dist[x] + 1;
                    parent[y] = c;
                    queue.push_back(y);
                }
            }
        }
        (dist, parent)
    }

    /// Build a noose from a closed corner sequence that starts at a vertex.
    pub fn noose_from_corners(&self, cycle: &[usize], start: VertexId) -> Noose {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        let mut positions = Vec::new();
        let mut node = start;
        let mut i = 0;
        while i < cycle.len() {
            let (c1, c2) = (cycle[i], cycle[i + 1]);
            let (_, f, p) = self.corners[c1];
            let (_, _, q) = self.corners[c2];
            vertices.push(node);
            faces.push(f);
            positions.push((p, q));
            node = self.other(c2, self.n + f);
            i += 2;
        }
        Noose {
            vertices,
            faces,
            corners: Some(positions),
        }
    }
}

/// Shortest non-contractible noose, ties broken by the lexicographically
/// least vertex sequence (starting at its least vertex).
pub fn shortest_noncontractible_noose(e: &EmbeddedGraph) -> Representativity {
    shortest_noose_avoiding(e, &[])
}

/// As [`shortest_noncontractible_noose`], but the noose may not use any
/// corner-graph node marked in `blocked` (vertices `0..n`, face `f` at
/// `n + f`; missing entries are free).
pub(crate) fn shortest_noose_avoiding(e: &EmbeddedGraph, blocked: &[bool]) -> Representativity {
    if e.genus() == 0 {
        return Representativity::Infinite;
    }
    debug_assert!(
        e.graph().is_connected(),
        "representativity expects a connected embedding"
    );
    let cg = CornerGraph::new(e);
    let free = |x: usize| !blocked.get(x).copied().unwrap_or(false);
    let Some(best) = shortest_length(e, &cg, &free) else {
        return Representativity::Infinite;
    };
    let noose =
        least_noose_of_length(e, &cg, best, &free).expect("a noose of the minimum length exists");
    Representativity::Finite {
        noose,
        length: best,
    }
}

/// Minimum number of vertices on a non-contractible noose, via fundamental
/// cycles of breadth-first trees rooted at every vertex.
fn shortest_length(
    e: &EmbeddedGraph,
    cg: &CornerGraph,
    free: &dyn Fn(usize) -> bool,
) -> Option<usize> {
    let n = cg.n;
    let mut best: Option<usize> = None;
    for root in (0..n).filter(|&r| free(r)) {
        let (dist, parent) = cg.bfs(root, free);
        // branch[x] = child of root on the tree path to x
        let mut branch = vec![usize::MAX; cg.nodes()];
        let mut order: Vec<usize> = (0..cg.nodes()).filter(|&x| dist[x] != usize::MAX).collect();
        order.sort_by_key(|&x| dist[x]);
        for &x in &order {
            if x == root {
                continue;
            }
            let p = cg.other(parent[x], x);
            branch[x] = if p == root { x } else { branch[p] };
        }
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for (c, &(v, f, _)) in cg.corners.iter().enumerate() {
            let (a, b) = (v, n + f);
            if dist[a] == usize::MAX || dist[b] == usize::MAX || parent[a] == c || parent[b] == c {
                continue;
            }
            if a != root && b != root && branch[a] == branch[b] {
                continue;
            }
            let len = dist[a] + dist[b] + 1;
            if best.is_some_and(|bst| len / 2 >= bst) {
                continue;
            }
            cands.push((len, c));
        }
        cands.sort_unstable();
        for (len, c) in cands {
            if best.is_some_and(|bst| len / 2 >= bst) {
                break;
            }
            let (v, f, _) = cg.corners[c];
            let path_to = |mut x: usize| {
                let mut cs = Vec::new();
                while x != root {
                    cs.push(parent[x]);
                    x = cg.other(parent[x], x);
                }
                cs.reverse();
                cs
            };
            let mut cycle = path_to(v);
            cycle.push(c);
            let mut back = path_to(n + f);
            back.reverse();
            cycle.extend(back);
            // rotate so the cycle starts at the root, which is a vertex
            let noose = cg.noose_from_corners(&cycle, root);
            if noose.check(e).is_ok() && !cg.bounds_disk(&cycle) {
                best = Some(noose.len());
            }
        }
    }
    best
}

/// Lexicographically least non-contractible noose with `len` vertices.
fn least_noose_of_length(
    e: &EmbeddedGraph,
    cg: &CornerGraph,
    len: usize,
    free: &dyn Fn(usize) -> bool,
) -> Option<Noose> {
    let n = cg.n;
    for v0 in (0..n).filter(|&v| free(v)) {
        let (dist, _) = cg.bfs(v0, |x| free(x) && (x >= n || x >= v0));
        let mut search = LexSearch {
            e,
            cg,
            len,
            v0,
            dist,
            used_v: vec![false; n],
            used_f: vec![false; e.faces().len()],
            path: Vec::new(),
        };
        search.used_v[v0] = true;
        if let Some(found) = search.extend(v0) {
            return Some(found);
        }
    }
    None
}

struct LexSearch<'a> {
    e: &'a EmbeddedGraph,
    cg: &'a CornerGraph,
    len: usize,
    v0: VertexId,
    dist: Vec<usize>,
    used_v: Vec<bool>,
    used_f: Vec<bool>,
    /// corner pairs (at v_i, at v_{i+1}) chosen so far
    path: Vec<(usize, usize)>,
}

impl LexSearch<'_> {
    /// Corner pairs `(c at from, c' at to)` through an unused face, grouped
    /// by the next vertex in increasing order.
    fn steps(&self, from: VertexId) -> Vec<(VertexId, usize, usize)> {
        let n = self.cg.n;
        let mut out = Vec::new();
        for &c in &self.cg.adj[from] {
            let f = self.cg.corners[c].1;
            if self.used_f[f] || self.dist[n + f] == usize::MAX {
                continue;
            }
            for &c2 in &self.cg.adj[n + f] {
                let w = self.cg.corners[c2].0;
                if c2 == c {
                    continue;
                }
                out.push((w, f, c, c2));
            }
        }
        out.sort_unstable_by_key(|&(w, f, c, c2)| (w, f, c, c2));
        out.into_iter().map(|(w, _, c, c2)| (w, c, c2)).collect()
    }

    fn extend(&mut self, cur: VertexId) -> Option<Noose> {
        let i = self.path.len();
        let remaining = self.len - i;
        for (w, c, c2) in self.steps(cur) {
            let f = self.cg.corners[c].1;
            if remaining == 1 {
                if w != self.v0 || (self.len == 1 && c == c2) {
                    continue;
                }
            } else {
                if w <= self.v0 || self.used_v[w] {
                    continue;
                }
                if self.dist[w] == usize::MAX || self.dist[w] > 2 * (remaining - 1) {
                    continue;
                }
            }
            self.path.push((c, c2));
            self.used_f[f] = true;
            if remaining == 1 {
                let cycle: Vec<usize> = self.path.iter().flat_map(|&(a, b)| [a, b]).collect();
                let noose = self.cg.noose_from_corners(&cycle, self.v0);
                if noose.check(self.e).is_ok() && !self.cg.bounds_disk(&cycle) {
                    return Some(noose);
                }
            } else {
                self.used_v[w] = true;
                if let Some(found) = self.extend(w) {
                    return Some(found);
                }
                self.used_v[w] = false;
            }
            self.used_f[f] = false;
            self.path.pop();
        }
        None
    }
}

/// Every simple cycle of the corner graph through at most `max_len`
/// vertices, as nooses; exponential, for oracles on tiny embeddings.
pub(crate) fn noose_candidates_exhaustive(
    e: &EmbeddedGraph,
    max_len: usize,
    visit: &mut dyn FnMut(&Noose),
) {
    let cg = CornerGraph::new(e);
    let n = cg.n;
    let mut on_path = vec![false; cg.nodes()];
    let mut cycle = Vec::new();
    for v0 in 0..n {
        on_path[v0] = true;
        walk_cycles(&cg, v0, v0, 2 * max_len, &mut on_path, &mut cycle, visit);
        on_path[v0] = false;
    }
}

fn walk_cycles(
    cg: &CornerGraph,
    v0: usize,
    x: usize,
    max_corners: usize,
    on_path: &mut [bool],
    cycle: &mut Vec<usize>,
    visit: &mut dyn FnMut(&Noose),
) {
    for &c in &cg.adj[x] {
        if cycle.last() == Some(&c) {
            continue;
        }
        let y = cg.other(c, x);
        if y == v0 && !cycle.is_empty() {
            cycle.push(c);
            visit(&cg.noose_from_corners(cycle, v0));
            cycle.pop();
            continue;
        }
        // vertices after the start must exceed it so each cycle is rooted once
        if on_path[y] || (y < cg.n && y < v0) || cycle.len() + 2 > max_corners {
            continue;
        }
        on_path[y] = true;
        cycle.push(c);
        walk_cycles(cg, v0, y, max_corners, on_path, cycle, visit);
        cycle.pop();
        on_path[y] = false;
    }
}

/// A component left after deleting a noose's vertices.
#[derive(Clone, Debug)]
pub struct CutPiece {
    pub embedding: EmbeddedGraph,
    pub map: Subgraph,
}

/// Delete the noose's vertices and return the remaining components, each
/// with its induced (or, if planar, freshly computed genus-0) embedding.
pub fn cut_along_noose(e: &EmbeddedGraph, noose: &Noose) -> Result<Vec<CutPiece>> {
    noose.check(e).map_err(Error::contract)?;
    if is_contractible(e, noose) {
        return Err(Error::contract("cannot cut along a contractible noose"));
    }
    let gone = noose.vertex_set();
    let keep: Vec<VertexId> = e.graph().vertices().filter(|v| !gone.contains(v)).collect();
    if keep.is_empty() {
        return Ok(Vec::new());
    }
    let (rest, sub) = e.induced(&keep)?;
    let mut pieces = Vec::new();
    for comp in rest.graph().components() {
        let (emb, local) = rest.induced(&comp)?;
        let emb = reembed_if_planar(emb);
        let map = Subgraph {
            graph: local.graph.clone(),
            vertex_map: local
                .vertex_map
                .iter()
                .map(|&v| sub.vertex_map[v])
                .collect(),
            edge_map: local.edge_map.iter().map(|&x| sub.edge_map[x]).collect(),
        };
        pieces.push(CutPiece {
            embedding: emb,
            map,
        });
    }
    Ok(pieces)
}

pub(crate) fn reembed_if_planar(emb: EmbeddedGraph) -> EmbeddedGraph {
    if emb.genus() == 0 {
        return emb;
    }
    match planar_embed(emb.graph()) {
        PlanarEmbedding::Planar(rot) => EmbeddedGraph::new(rot).expect("planar rotation"),
        PlanarEmbedding::NonPlanar => emb,
    }
}
