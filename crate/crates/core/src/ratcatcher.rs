//! Planar branchwidth and optimal sphere-cut decompositions.
//!
//! Every middle set of a sphere-cut decomposition is cut out by a noose,
//! and a noose is determined by the edge set `X` it encloses: it passes
//! through exactly the corners whose two edges lie on different sides. The
//! search below works on such noose-bounded regions. A region splits into
//! two by a path of corners running through its interior between two nodes
//! of its noose; a region is solvable at width `k` if it is a single edge
//! or some split yields two solvable regions with middle sets of size at
//! most `k`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::branchdecomp::{
    compose_parts, parse_decomposition_lines, serialize_decomposition, star_forest_decomposition,
};
use crate::branchdecomp::{middle_sets, validate, BranchDecomposition};
use crate::error::{Error, Result};
use crate::graph::{blocks, EdgeId, Graph, VertexId};
use crate::surface::{EmbeddedGraph, Map, Noose};
use crate::Diagnostic;

/// A branch-decomposition with one noose per tree edge (indexed like
/// `bd.tree_edges()`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereCutDecomposition {
    pub bd: BranchDecomposition,
    pub nooses: Vec<Noose>,
}

/// Medial multigraph: one vertex per edge, one edge per corner.
#[derive(Clone, Debug)]
pub struct MedialStructure {
    /// medial vertex -> original edge
    pub edge_of: Vec<EdgeId>,
    /// medial edges as pairs of medial vertices (parallel pairs allowed)
    pub ends: Vec<(usize, usize)>,
    /// cyclic order of medial edges around each medial vertex, as darts
    /// (`2c` at the first end of medial edge `c`, `2c + 1` at the second)
    pub rotation: Vec<Vec<usize>>,
    pub face_count: usize,
    pub genus: usize,
}

impl MedialStructure {
    pub fn degree(&self, x: usize) -> usize {
        self.rotation[x].len()
    }
}

fn require_sphere(e: &EmbeddedGraph) -> Result<()> {
    if e.genus() != 0 {
        return Err(Error::contract("embedding must have genus 0"));
    }
    Ok(())
}

pub fn medial_graph(e: &EmbeddedGraph) -> Result<MedialStructure> {
    require_sphere(e)?;
    let g = e.graph();
    if !g.is_connected() {
        return Err(Error::contract("medial graph needs a connected embedding"));
    }
    if let Some(v) = g.vertices().find(|&v| g.degree(v) == 1) {
        return Err(Error::contract(format!("vertex {} has degree one", v + 1)));
    }
    if g.m() == 0 {
        return Err(Error::contract("medial graph needs an edge"));
    }
    let oriented = EmbeddedGraph::new(e.rotation().normalized())?;
    let map = oriented.map();
    // corner c: consecutive darts (d, succ d) at a vertex; it joins the
    // medial vertices of their edges
    let mut ends = Vec::new();
    let mut after = vec![usize::MAX; 2 * g.m()];
    let mut before = vec![usize::MAX; 2 * g.m()];
    for v in g.vertices() {
        for &d in &map.rot[v] {
            let s = map.succ(d);
            let c = ends.len();
            ends.push((d / 2, s / 2));
            after[d] = c;
            before[s] = c;
        }
    }
    let rotation: Vec<Vec<usize>> = g
        .edge_ids()
        .map(|x| {
            let (du, dv) = (2 * x, 2 * x + 1);
            vec![
                2 * after[du],
                2 * before[dv] + 1,
                2 * after[dv],
                2 * before[du] + 1,
            ]
        })
        .collect();
    let medial = Map::new(g.m(), &ends, vec![1; ends.len()], rotation.clone());
    let faces = medial.faces();
    let genus = medial
        .euler_genus(&faces)
        .ok_or_else(|| Error::internal("medial rotation malformed"))?;
    Ok(MedialStructure {
        edge_of: g.edge_ids().collect(),
        ends,
        rotation,
        face_count: faces.len(),
        genus,
    })
}

#[derive(Clone, Copy, Debug)]
struct Corner {
    vertex: VertexId,
    face: usize,
    pos: usize,
    /// edge arriving at `vertex` and edge leaving it along the face walk
    a: EdgeId,
    b: EdgeId,
}

/// Corner incidences of a sphere embedding.
pub(crate) struct Regions<'a> {
    e: &'a EmbeddedGraph,
    n: usize,
    corners: Vec<Corner>,
    /// node -> corners; vertex `v` is node `v`, face `f` is node `n + f`
    at_node: Vec<Vec<usize>>,
    /// edge -> corners it bounds
    of_edge: Vec<Vec<usize>>,
}

type Split = (FixedBitSet, FixedBitSet);

impl<'a> Regions<'a> {
    pub fn new(e: &'a EmbeddedGraph) -> Self {
        let n = e.graph().n();
        let mut corners = Vec::new();
        let mut at_node = vec![Vec::new(); n + e.faces().len()];
        for (f, face) in e.faces().iter().enumerate() {
            let k = face.len();
            for p in 0..k {
                let s = face.sides[p];
                let prev = face.sides[(p + k - 1) % k];
                let c = corners.len();
                corners.push(Corner {
                    vertex: s.vertex,
                    face: f,
                    pos: p,
                    a: prev.edge,
                    b: s.edge,
                });
                at_node[s.vertex].push(c);
                at_node[n + f].push(c);
            }
        }
        let mut of_edge = vec![Vec::new(); e.graph().m()];
        for (c, k) in corners.iter().enumerate() {
            of_edge[k.a].push(c);
            if k.b != k.a {
                of_edge[k.b].push(c);
            }
        }
        Regions {
            e,
            n,
            corners,
            at_node,
            of_edge,
        }
    }

    fn m(&self) -> usize {
        self.e.graph().m()
    }

    fn set(&self, edges: impl IntoIterator<Item = EdgeId>) -> FixedBitSet {
        let mut x = FixedBitSet::with_capacity(self.m());
        for e in edges {
            x.insert(e);
        }
        x
    }

    fn boundary(&self, x: &FixedBitSet) -> BTreeSet<VertexId> {
        let g = self.e.graph();
        let mut out = BTreeSet::new();
        for e in x.ones() {
            let (u, v) = g.endpoints(e);
            for w in [u, v] {
                if g.incident(w).iter().any(|&(_, f)| !x.contains(f)) {
                    out.insert(w);
                }
            }
        }
        out
    }

    fn crossed(&self, x: &FixedBitSet, c: usize) -> bool {
        let k = &self.corners[c];
        x.contains(k.a) != x.contains(k.b)
    }

    fn other(&self, c: usize, node: usize) -> usize {
        let k = &self.corners[c];
        if node == k.vertex {
            self.n + k.face
        } else {
            k.vertex
        }
    }

    /// The noose through the corners separating `x` from its complement,
    /// as a noose and its corner cycle.
    pub fn find_noose(&self, x: &FixedBitSet) -> std::result::Result<(Noose, Vec<usize>), String> {
        let crossed: Vec<usize> = (0..self.corners.len())
            .filter(|&c| self.crossed(x, c))
            .collect();
        if crossed.is_empty() {
            return Err("empty middle set".into());
        }
        let mut per_node: HashMap<usize, Vec<usize>> = HashMap::new();
        for &c in &crossed {
            let k = &self.corners[c];
            per_node.entry(k.vertex).or_default().push(c);
            per_node.entry(self.n + k.face).or_default().push(c);
        }
        let mut nodes: Vec<(&usize, &Vec<usize>)> = per_node.iter().collect();
        nodes.sort();
        for (&node, cs) in nodes {
            if cs.len() != 2 {
                return Err(if node >= self.n {
                    format!("face {} crossed twice", node - self.n + 1)
                } else {
                    format!("vertex {} separates several runs", node + 1)
                });
            }
        }
        let start_vertex = crossed
            .iter()
            .map(|&c| self.corners[c].vertex)
            .min()
            .expect("nonempty");
        let first = per_node[&start_vertex][0];
        let mut cycle = Vec::new();
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        let mut positions = Vec::new();
        let mut v = start_vertex;
        let mut c = first;
        loop {
            let f = self.n + self.corners[c].face;
            let back = per_node[&f]
                .iter()
                .copied()
                .find(|&d| d != c)
                .expect("two corners");
            vertices.push(v);
            faces.push(self.corners[c].face);
            positions.push((self.corners[c].pos, self.corners[back].pos));
            cycle.push(c);
            cycle.push(back);
            v = self.corners[back].vertex;
            let next = per_node[&v]
                .iter()
                .copied()
                .find(|&d| d != back)
                .expect("two corners");
            if next == first {
                break;
            }
            if cycle.len() > crossed.len() {
                return Err("middle set does not form a single noose".into());
            }
            c = next;
        }
        if cycle.len() != crossed.len() {
            return Err("middle set splits into several nooses".into());
        }
        Ok((
            Noose {
                vertices,
                faces,
                corners: Some(positions),
            },
            cycle,
        ))
    }

    /// Pieces of `x` under corner adjacency, ignoring `blocked` corners.
    fn pieces(&self, x: &FixedBitSet, blocked: &HashSet<usize>) -> Vec<FixedBitSet> {
        let m = self.m();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for e in x.ones() {
            for &c in &self.of_edge[e] {
                let k = &self.corners[c];
                if k.a == k.b || !x.contains(k.a) || !x.contains(k.b) || blocked.contains(&c) {
                    continue;
                }
                let (ra, rb) = (find(&mut parent, k.a), find(&mut parent, k.b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut groups: Vec<(usize, FixedBitSet)> = Vec::new();
        for e in x.ones() {
            let r = find(&mut parent, e);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, s)) => s.insert(e),
                None => {
                    let mut s = FixedBitSet::with_capacity(m);
                    s.insert(e);
                    groups.push((r, s));
                }
            }
        }
        groups.into_iter().map(|(_, s)| s).collect()
    }

    /// All splits of region `x` (bounded by corner cycle `gamma`) into two
    /// noose-bounded regions with middle sets of size at most `k`.
    fn splits(&self, x: &FixedBitSet, gamma: &[usize], k: usize) -> Vec<Split> {
        let nodes = self.at_node.len();
        let mut on_gamma = vec![false; nodes];
        for &c in gamma {
            let kc = &self.corners[c];
            on_gamma[kc.vertex] = true;
            on_gamma[self.n + kc.face] = true;
        }
        let interior = |c: usize| {
            let kc = &self.corners[c];
            x.contains(kc.a) && x.contains(kc.b)
        };
        let mut ends: Vec<usize> = (0..nodes).filter(|&v| on_gamma[v]).collect();
        ends.sort_unstable();
        let mut found: Vec<Split> = Vec::new();
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut visited = vec![false; nodes];
        let mut path: Vec<usize> = Vec::new();
        // both middle sets hold every path vertex, the path ends count twice
        // and the rest of the noose once, so their sizes add up to
        // |gamma| + ends + 2 * inner <= 2k
        let gamma_vertices = gamma.len() / 2;
        for &a in &ends {
            let Some(budget) = (2 * k).checked_sub(gamma_vertices + usize::from(a < self.n)) else {
                continue;
            };
            visited[a] = true;
            self.walk(
                a,
                a,
                x,
                &on_gamma,
                &interior,
                &mut visited,
                &mut path,
                budget,
                k,
                &mut seen,
                &mut found,
            );
            visited[a] = false;
        }
        found.sort_by_key(|(p, q)| {
            let (bp, bq) = (self.boundary(p).len(), self.boundary(q).len());
            (bp.max(bq), p.count_ones(..).abs_diff(q.count_ones(..)))
        });
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        start: usize,
        at: usize,
        x: &FixedBitSet,
        on_gamma: &[bool],
        interior: &dyn Fn(usize) -> bool,
        visited: &mut [bool],
        path: &mut Vec<usize>,
        budget: usize,
        k: usize,
        seen: &mut HashSet<FixedBitSet>,
        found: &mut Vec<Split>,
    ) {
        for &c in &self.at_node[at] {
            if path.last() == Some(&c) || !interior(c) {
                continue;
            }
            let y = self.other(c, at);
            if on_gamma[y] {
                if y > start && usize::from(y < self.n) <= budget {
                    path.push(c);
                    self.try_split(x, path, k, seen, found);
                    path.pop();
                }
                continue;
            }
            let cost = 2 * usize::from(y < self.n);
            if visited[y] || cost > budget {
                continue;
            }
            visited[y] = true;
            path.push(c);
            self.walk(
                start,
                y,
                x,
                on_gamma,
                interior,
                visited,
                path,
                budget - cost,
                k,
                seen,
                found,
            );
            path.pop();
            visited[y] = false;
        }
    }

    fn try_split(
        &self,
        x: &FixedBitSet,
        path: &[usize],
        k: usize,
        seen: &mut HashSet<FixedBitSet>,
        found: &mut Vec<Split>,
    ) {
        let blocked: HashSet<usize> = path.iter().copied().collect();
        let parts = self.pieces(x, &blocked);
        if parts.len() != 2 {
            return;
        }
        let (p, q) = if parts[0].minimum() < parts[1].minimum() {
            (parts[0].clone(), parts[1].clone())
        } else {
            (parts[1].clone(), parts[0].clone())
        };
        if !seen.insert(p.clone()) {
            return;
        }
        if self.boundary(&p).len() > k || self.boundary(&q).len() > k {
            return;
        }
        if self.find_noose(&p).is_err() || self.find_noose(&q).is_err() {
            return;
        }
        found.push((p, q));
    }
}

#[derive(Clone, Debug)]
enum Outcome {
    Leaf,
    Split(FixedBitSet, FixedBitSet),
    Fail,
}

/// Memoised region search at a fixed width.
struct Search<'r, 'a> {
    regions: &'r Regions<'a>,
    k: usize,
    memo: HashMap<FixedBitSet, Outcome>,
}

impl Search<'_, '_> {
    fn solve(&mut self, x: &FixedBitSet) -> bool {
        if let Some(o) = self.memo.get(x) {
            return !matches!(o, Outcome::Fail);
        }
        if x.count_ones(..) == 1 {
            self.memo.insert(x.clone(), Outcome::Leaf);
            return true;
        }
        let gamma = match self.regions.find_noose(x) {
            Ok((_, cycle)) => cycle,
            Err(_) => {
                self.memo.insert(x.clone(), Outcome::Fail);
                return false;
            }
        };
        for (p, q) in self.regions.splits(x, &gamma, self.k) {
            if self.solve(&p) && self.solve(&q) {
                self.memo.insert(x.clone(), Outcome::Split(p, q));
                return true;
            }
        }
        self.memo.insert(x.clone(), Outcome::Fail);
        false
    }

    /// Tree below region `x`; returns its top node.
    fn build(&self, x: &FixedBitSet, bd: &mut BranchDecomposition) -> usize {
        match &self.memo[x] {
            Outcome::Leaf => bd.add_node(x.minimum()),
            Outcome::Split(p, q) => {
                let u = bd.add_node(None);
                let a = self.build(p, bd);
                let b = self.build(q, bd);
                bd.link(u, a);
                bd.link(u, b);
                u
            }
            Outcome::Fail => unreachable!("built only after success"),
        }
    }
}

/// Region search on the whole embedding at width `k`; `None` if no
/// sphere-cut decomposition of width at most `k` is found.
fn region_decomposition(e: &EmbeddedGraph, k: usize) -> Option<SphereCutDecomposition> {
    let g = e.graph();
    let m = g.m();
    if m == 1 {
        return Some(SphereCutDecomposition {
            bd: BranchDecomposition::single(0),
            nooses: Vec::new(),
        });
    }
    let regions = Regions::new(e);
    for root in 0..m {
        let rest = regions.set((0..m).filter(|&x| x != root));
        if regions.find_noose(&rest).is_err() || regions.boundary(&rest).len() > k {
            continue;
        }
        let mut search = Search {
            regions: &regions,
            k,
            memo: HashMap::new(),
        };
        if !search.solve(&rest) {
            return None;
        }
        let mut bd = BranchDecomposition::empty();
        let leaf = bd.add_node(Some(root));
        let top = search.build(&rest, &mut bd);
        bd.link(leaf, top);
        let nooses = nooses_for(e, &regions, &bd);
        return Some(SphereCutDecomposition { bd, nooses });
    }
    None
}

fn nooses_for(e: &EmbeddedGraph, regions: &Regions<'_>, bd: &BranchDecomposition) -> Vec<Noose> {
    bd.edge_sides()
        .into_iter()
        .map(|side| {
            let x = regions.set(side);
            match regions.find_noose(&x) {
                Ok((noose, _)) => noose,
                Err(_) => best_effort_noose(e, &regions.boundary(&x)),
            }
        })
        .collect()
}

/// Boundary vertices in order with the least common face between
/// neighbours; faces may repeat, which validation reports.
fn best_effort_noose(e: &EmbeddedGraph, mid: &BTreeSet<VertexId>) -> Noose {
    let vertices: Vec<VertexId> = mid.iter().copied().collect();
    let vf = e.vertex_faces();
    let l = vertices.len();
    let faces = (0..l)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % l]);
            vf[a]
                .iter()
                .copied()
                .find(|f| vf[b].contains(f))
                .unwrap_or(vf[a][0])
        })
        .collect();
    Noose::new(vertices, faces)
}

fn check_planar_input(e: &EmbeddedGraph) -> Result<()> {
    require_sphere(e)?;
    if !e.graph().is_connected() {
        return Err(Error::contract("embedding must be connected"));
    }
    Ok(())
}

/// Exact branchwidth of a connected graph embedded in the sphere.
pub fn planar_branchwidth(e: &EmbeddedGraph) -> Result<usize> {
    check_planar_input(e)?;
    Ok(block_widths(e, None)?.0)
}

/// Width of `e` from its blocks, and optimal per-block decompositions
/// (leaves labelled by edge ids of `e`). With `cap`, stops as soon as some
/// block exceeds it.
fn block_widths(
    e: &EmbeddedGraph,
    cap: Option<usize>,
) -> Result<(usize, Vec<BranchDecomposition>)> {
    let g = e.graph();
    if g.m() == 0 {
        return Ok((0, Vec::new()));
    }
    if g.is_star_forest() {
        let w = usize::from(g.vertices().any(|v| g.degree(v) > 1));
        return Ok((w, vec![star_forest_decomposition(g)]));
    }
    let forest = blocks(g);
    let solved: Vec<Result<(usize, BranchDecomposition)>> = forest
        .block_edges
        .par_iter()
        .filter(|es| !es.is_empty())
        .map(|es| {
            if es.len() < 3 {
                return Ok((es.len() - 1, BranchDecomposition::caterpillar(es)));
            }
            let (sub, map) = e.edge_induced(es)?;
            let mut k = 2;
            loop {
                if cap.is_some_and(|c| k > c) {
                    return Ok((k, BranchDecomposition::empty()));
                }
                if let Some(scd) = region_decomposition(&sub, k) {
                    return Ok((k, scd.bd.relabel(&map.edge_map)));
                }
                k += 1;
            }
        })
        .collect();
    let mut width = 2;
    let mut parts = Vec::new();
    for r in solved {
        let (w, bd) = r?;
        width = width.max(w);
        parts.push(bd);
    }
    Ok((width, parts))
}

/// True iff the branchwidth is at most `k`.
pub fn decide_planar_bw(e: &EmbeddedGraph, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::input("k must be positive"));
    }
    check_planar_input(e)?;
    Ok(block_widths(e, Some(k))?.0 <= k)
}

/// Optimal branch-decomposition of a (possibly disconnected) graph
/// embedded in the sphere, built from optimal block decompositions.
pub fn optimal_planar_decomposition(e: &EmbeddedGraph) -> Result<(usize, BranchDecomposition)> {
    require_sphere(e)?;
    let (w, parts) = block_widths(e, None)?;
    let g = e.graph();
    if g.m() == 0 {
        return Ok((0, BranchDecomposition::empty()));
    }
    if parts.len() == 1 {
        return Ok((w, parts.into_iter().next().expect("one part")));
    }
    Ok((w, compose_parts(g, &parts)?))
}

/// Optimal decomposition if the branchwidth is at most `cap`, else `None`.
pub fn planar_decomposition_capped(
    e: &EmbeddedGraph,
    cap: usize,
) -> Result<Option<(usize, BranchDecomposition)>> {
    require_sphere(e)?;
    let (w, parts) = block_widths(e, Some(cap))?;
    if w > cap {
        return Ok(None);
    }
    let g = e.graph();
    if g.m() == 0 {
        return Ok(Some((0, BranchDecomposition::empty())));
    }
    let bd = if parts.len() == 1 {
        parts.into_iter().next().expect("one part")
    } else {
        compose_parts(g, &parts)?
    };
    Ok(Some((w, bd)))
}

/// Optimal sphere-cut decomposition. Graphs with a bridge whose ends both
/// have other edges admit none; for them the optimal decomposition is
/// returned with best-effort nooses that fail validation.
pub fn sphere_cut_decomposition(e: &EmbeddedGraph) -> Result<SphereCutDecomposition> {
    check_planar_input(e)?;
    let (w, parts) = block_widths(e, None)?;
    if let Some(scd) = region_decomposition(e, w) {
        return Ok(scd);
    }
    let g = e.graph();
    let bd = if parts.len() == 1 {
        parts.into_iter().next().expect("one part")
    } else {
        compose_parts(g, &parts)?
    };
    let regions = Regions::new(e);
    let nooses = nooses_for(e, &regions, &bd);
    Ok(SphereCutDecomposition { bd, nooses })
}

/// True when some bridge has two non-pendant ends.
pub fn has_inner_bridge(g: &Graph) -> bool {
    blocks(g).bridges.iter().any(|&b| {
        let (u, v) = g.endpoints(b);
        g.degree(u) > 1 && g.degree(v) > 1
    })
}

pub fn validate_sphere_cut(scd: &SphereCutDecomposition, e: &EmbeddedGraph) -> Diagnostic {
    let g = e.graph();
    validate(&scd.bd, g)?;
    let tree = scd.bd.tree_edges();
    if scd.nooses.len() != tree.len() {
        return Err(format!(
            "{} nooses for {} tree edges",
            scd.nooses.len(),
            tree.len()
        ));
    }
    let mids = middle_sets(&scd.bd, g).map_err(|x| x.to_string())?;
    let regions = Regions::new(e);
    for (i, (noose, mid)) in scd.nooses.iter().zip(&mids).enumerate() {
        let label = i + 1;
        let mut faces = BTreeSet::new();
        for &f in &noose.faces {
            if !faces.insert(f) {
                return Err(format!("tree edge {label}: face {} crossed twice", f + 1));
            }
        }
        noose
            .check(e)
            .map_err(|x| format!("tree edge {label}: {x}"))?;
        let vs: BTreeSet<VertexId> = noose.vertices.iter().copied().collect();
        if let Some(v) = mid.difference(&vs).next() {
            return Err(format!(
                "tree edge {label}: noose misses boundary vertex {}",
                v + 1
            ));
        }
        if let Some(v) = vs.difference(mid).next() {
            return Err(format!(
                "tree edge {label}: noose meets vertex {} outside the middle set",
                v + 1
            ));
        }
        if noose.corners.is_some() {
            let side = regions.set(scd.bd.edge_sides()[i].iter().copied());
            match regions.find_noose(&side) {
                Ok((expected, _)) if same_cycle(&expected, noose) => {}
                Ok(_) => {
                    return Err(format!(
                        "tree edge {label}: noose does not separate its sides"
                    ))
                }
                Err(x) => return Err(format!("tree edge {label}: {x}")),
            }
        }
    }
    Ok(())
}

/// Same corner cycle, in either direction and from any start.
fn same_cycle(a: &Noose, b: &Noose) -> bool {
    let corners = |n: &Noose| {
        let mut cs: Vec<(usize, usize)> = Vec::new();
        if let Some(c) = &n.corners {
            for (i, &(p, q)) in c.iter().enumerate() {
                cs.push((n.faces[i], p));
                cs.push((n.faces[i], q));
            }
        }
        cs.sort_unstable();
        cs
    };
    corners(a) == corners(b)
}

/// Decomposition format followed by `noose <tree-edge> v1 f1 v2 f2 ...`.
pub fn serialize_sphere_cut(scd: &SphereCutDecomposition) -> String {
    let mut out = serialize_decomposition(&scd.bd);
    for (i, n) in scd.nooses.iter().enumerate() {
        let _ = write!(out, "noose {}", i + 1);
        for (v, f) in n.vertices.iter().zip(&n.faces) {
            let _ = write!(out, " {} {}", v + 1, f + 1);
        }
        out.push('\n');
    }
    out
}

pub fn parse_sphere_cut(text: &str) -> Result<SphereCutDecomposition> {
    use crate::graph::parse_num;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (bd, first) = parse_decomposition_lines(&mut lines)?;
    let tree = bd.tree_edges().len();
    let mut nooses: Vec<Option<Noose>> = vec![None; tree];
    for (no, line) in first.into_iter().chain(lines) {
        let t = line.trim();
        if t.is_empty() || t == "c" || t.starts_with("c ") {
            continue;
        }
        let w: Vec<&str> = t.split_whitespace().collect();
        if w[0] != "noose" || w.len() < 4 || !(w.len() - 2).is_multiple_of(2) {
            return Err(Error::parse(
                no,
                "expected 'noose <tree-edge> <v1> <f1> ...'",
            ));
        }
        let i: usize = parse_num(no, Some(w[1]))?;
        if i == 0 || i > tree || nooses[i - 1].is_some() {
            return Err(Error::parse(no, "tree edge out of range or repeated"));
        }
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for pair in w[2..].chunks(2) {
            let v: usize = parse_num(no, Some(pair[0]))?;
            let f: usize = parse_num(no, Some(pair[1]))?;
            if v == 0 || f == 0 {
                return Err(Error::parse(no, "ids are 1-indexed"));
            }
            vertices.push(v - 1);
            faces.push(f - 1);
        }
        nooses[i - 1] = Some(Noose::new(vertices, faces));
    }
    let nooses = nooses
        .into_iter()
        .enumerate()
        .map(|(i, n)| {
            n.ok_or_else(|| Error::parse(1, format!("missing noose for tree edge {}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SphereCutDecomposition { bd, nooses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn medial_is_four_regular_and_planar() {
        for e in [
            fixtures::cycle(3),
            fixtures::cycle(4),
            fixtures::k4(),
            fixtures::grid(2, 3),
        ] {
            let med = medial_graph(&e).unwrap();
            assert!((0..med.edge_of.len()).all(|x| med.degree(x) == 4));
            assert_eq!(med.genus, 0);
            assert_eq!(med.face_count, e.graph().n() + e.faces().len());
        }
        let tri = medial_graph(&fixtures::cycle(3)).unwrap();
        assert_eq!(tri.ends.len(), 6);
        assert!(medial_graph(&fixtures::path(2)).is_err());
    }

    #[test]
    fn small_widths() {
        assert_eq!(planar_branchwidth(&fixtures::k4()).unwrap(), 3);
        assert_eq!(planar_branchwidth(&fixtures::cycle(5)).unwrap(), 2);
        assert_eq!(planar_branchwidth(&fixtures::grid(2, 3)).unwrap(), 2);
        assert_eq!(planar_branchwidth(&fixtures::grid(3, 3)).unwrap(), 3);
        assert_eq!(planar_branchwidth(&fixtures::star(3)).unwrap(), 1);
        assert_eq!(planar_branchwidth(&fixtures::path(2)).unwrap(), 0);
        assert!(decide_planar_bw(&fixtures::k4(), 3).unwrap());
        assert!(!decide_planar_bw(&fixtures::k4(), 2).unwrap());
        assert!(!decide_planar_bw(&fixtures::cycle(5), 1).unwrap());
        assert!(decide_planar_bw(&fixtures::k4(), 0).is_err());
    }

    #[test]
    fn sphere_cuts_validate() {
        for e in [
            fixtures::cycle(3),
            fixtures::cycle(6),
            fixtures::grid(2, 3),
            fixtures::k4(),
            fixtures::wheel(5),
            fixtures::grid(3, 4),
        ] {
            let scd = sphere_cut_decomposition(&e).unwrap();
            assert_eq!(validate_sphere_cut(&scd, &e), Ok(()));
            assert_eq!(
                crate::branchdecomp::width(&scd.bd, e.graph()).unwrap(),
                planar_branchwidth(&e).unwrap()
            );
            let back = parse_sphere_cut(&serialize_sphere_cut(&scd)).unwrap();
            assert_eq!(validate_sphere_cut(&back, &e), Ok(()));
        }
    }

    #[test]
    fn bridge_has_no_sphere_cut() {
        let p4 = fixtures::path(4);
        assert!(has_inner_bridge(p4.graph()));
        let scd = sphere_cut_decomposition(&p4).unwrap();
        assert_eq!(crate::branchdecomp::width(&scd.bd, p4.graph()).unwrap(), 2);
        let err = validate_sphere_cut(&scd, &p4).unwrap_err();
        assert!(err.contains("crossed twice"), "{err}");
    }

    #[test]
    fn validator_flags_missing_vertex() {
        let e = fixtures::k4();
        let mut scd = sphere_cut_decomposition(&e).unwrap();
        let i = (0..scd.nooses.len())
            .find(|&i| scd.nooses[i].len() >= 2)
            .unwrap();
        scd.nooses[i].vertices.pop();
        scd.nooses[i].faces.pop();
        scd.nooses[i].corners = None;
        assert!(validate_sphere_cut(&scd, &e).is_err());
    }
}
