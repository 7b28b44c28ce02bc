//! End-to-end approximation over a supplied near-embedding
//! tree-decomposition: decompose every bag, then glue the bag
//! decompositions bottom-up along the adhesion sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::branchdecomp::{extend_over_apex, splice, validate, width, BranchDecomposition};
use crate::error::{Error, Result};
use crate::genusreduce::{certify, LowerBoundCertificate};
use crate::graph::{parse_graph_lines, parse_num, serialize_graph, EdgeId, Graph, VertexId};
use crate::oracle::{exact_bw, OracleMode};
use crate::ratcatcher::optimal_planar_decomposition;
use crate::surface::{
    reembed_if_planar, shortest_noncontractible_noose, shortest_noose_avoiding, EmbeddedGraph,
    Representativity,
};
use crate::vortex::{
    attach_vortices, normalize, parse_surface_rendition, serialize_rendition, LinearDecomposition,
    Society, SphereRendition, Vortex,
};
use crate::Diagnostic;

/// Largest edge count the exact fallback of [`eptas_bw`] attempts.
pub const EXACT_FALLBACK_EDGES: usize = 24;

/// Where an adhesion set sits inside its parent bag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdhesionKind {
    /// Inside the apex set.
    Apex,
    /// Inside the apex set plus one bag of one vortex decomposition.
    VortexBag,
    /// Inside the apex set plus the attachments of a cell with at most
    /// three of them.
    SmallCell,
}

impl AdhesionKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AdhesionKind::Apex => "apex",
            AdhesionKind::VortexBag => "vortex",
            AdhesionKind::SmallCell => "cell",
        }
    }

    pub fn from_keyword(w: &str) -> Option<Self> {
        match w {
            "apex" => Some(AdhesionKind::Apex),
            "vortex" => Some(AdhesionKind::VortexBag),
            "cell" => Some(AdhesionKind::SmallCell),
            _ => None,
        }
    }
}

impl fmt::Display for AdhesionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adhesion {
    pub child: usize,
    pub vertices: BTreeSet<VertexId>,
    pub hint: Option<AdhesionKind>,
}

/// One bag: its vertices, apex set, and a rendition of the torso minus
/// the apex set on some surface.
#[derive(Clone, Debug)]
pub struct Bag {
    pub vertices: BTreeSet<VertexId>,
    pub apex: BTreeSet<VertexId>,
    pub rendition: SphereRendition,
    /// rendition vertex -> input vertex
    pub map: Vec<VertexId>,
    pub adhesions: Vec<Adhesion>,
}

/// A rooted tree-decomposition of `graph` whose bags carry near-embeddings.
#[derive(Clone, Debug)]
pub struct NearEmbeddingInput {
    pub graph: Graph,
    pub root: usize,
    /// `(parent, child)` pairs
    pub tree: Vec<(usize, usize)>,
    pub bags: Vec<Bag>,
}

/// Torso of a bag with local vertex ids.
#[derive(Clone, Debug)]
pub struct Torso {
    pub graph: Graph,
    /// local vertex -> input vertex, increasing
    pub vertices: Vec<VertexId>,
}

impl Torso {
    pub fn local(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    fn edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.graph.edge_between(self.local(u)?, self.local(v)?)
    }
}

fn names(xs: &BTreeSet<VertexId>) -> String {
    xs.iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn pairs(xs: &BTreeSet<VertexId>) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
    xs.iter()
        .flat_map(move |&u| xs.range(u + 1..).map(move |&v| (u, v)))
}

impl NearEmbeddingInput {
    pub fn children(&self, t: usize) -> Vec<usize> {
        let mut cs: Vec<usize> = self
            .tree
            .iter()
            .filter(|&&(p, _)| p == t)
            .map(|&(_, c)| c)
            .collect();
        cs.sort_unstable();
        cs
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.tree.iter().find(|&&(_, c)| c == t).map(|&(p, _)| p)
    }

    /// Bags from the root outwards.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = vec![self.root];
        let mut i = 0;
        while i < order.len() {
            order.extend(self.children(order[i]));
            i += 1;
        }
        order
    }

    pub fn adhesion(&self, parent: usize, child: usize) -> BTreeSet<VertexId> {
        self.bags[parent]
            .vertices
            .intersection(&self.bags[child].vertices)
            .copied()
            .collect()
    }

    pub fn max_adhesion(&self) -> usize {
        self.tree
            .iter()
            .map(|&(p, c)| self.adhesion(p, c).len())
            .max()
            .unwrap_or(0)
    }

    /// All adhesion vertices of bag `t`, towards its parent and children.
    pub fn adhesion_vertices(&self, t: usize) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        if let Some(p) = self.parent(t) {
            out.extend(self.adhesion(p, t));
        }
        for c in self.children(t) {
            out.extend(self.adhesion(t, c));
        }
        out
    }

    /// Rendered edges of bag `t` as sorted pairs of input vertices.
    fn rendered(&self, t: usize) -> Result<BTreeSet<(VertexId, VertexId)>> {
        let bag = &self.bags[t];
        let full = bag.rendition.full_graph()?;
        Ok(full
            .graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (bag.map[u], bag.map[v]);
                (a.min(b), a.max(b))
            })
            .collect())
    }

    /// Induced subgraph on the bag, plus the rendered edges, plus cliques
    /// on every adhesion set of the bag.
    pub fn torso(&self, t: usize) -> Result<Torso> {
        let vertices: Vec<VertexId> = self.bags[t].vertices.iter().copied().collect();
        let mut graph = Graph::new(vertices.len().max(1))?;
        let local = |v: VertexId| vertices.binary_search(&v).expect("bag vertex");
        let add = |graph: &mut Graph, u: VertexId, v: VertexId| -> Result<()> {
            let (a, b) = (local(u), local(v));
            if graph.edge_between(a, b).is_none() {
                graph.add_edge(a, b)?;
            }
            Ok(())
        };
        for &(u, v) in self.graph.edges() {
            if self.bags[t].vertices.contains(&u) && self.bags[t].vertices.contains(&v) {
                add(&mut graph, u, v)?;
            }
        }
        for (u, v) in self.rendered(t)? {
            add(&mut graph, u, v)?;
        }
        let mut sets: Vec<BTreeSet<VertexId>> = self
            .children(t)
            .iter()
            .map(|&c| self.adhesion(t, c))
            .collect();
        if let Some(p) = self.parent(t) {
            sets.push(self.adhesion(p, t));
        }
        for s in &sets {
            for (u, v) in pairs(s) {
                add(&mut graph, u, v)?;
            }
        }
        Ok(Torso { graph, vertices })
    }

    /// Every case the adhesion set `s` of a child of `t` satisfies.
    pub fn adhesion_cases(&self, t: usize, s: &BTreeSet<VertexId>) -> Vec<AdhesionKind> {
        let bag = &self.bags[t];
        let rest: BTreeSet<VertexId> = s.difference(&bag.apex).copied().collect();
        if rest.is_empty() {
            return vec![AdhesionKind::Apex];
        }
        let mut out = Vec::new();
        let r = &bag.rendition;
        let inside = |xs: &mut dyn Iterator<Item = VertexId>| {
            let set: BTreeSet<VertexId> = xs.map(|x| bag.map[x]).collect();
            rest.is_subset(&set)
        };
        if r.vortices.iter().any(|vx| {
            vx.decomposition
                .bags
                .iter()
                .any(|x| inside(&mut x.iter().copied()))
        }) {
            out.push(AdhesionKind::VortexBag);
        }
        let g0 = r.ground.graph();
        let vortex_faces: BTreeSet<usize> = r.vortices.iter().map(|vx| vx.face).collect();
        let by_vertex = rest.len() == 1 && (0..g0.n()).any(|x| rest.contains(&bag.map[x]));
        let by_edge = g0.edge_ids().filter(|e| !r.auxiliary.contains(e)).any(|e| {
            let (u, v) = g0.endpoints(e);
            inside(&mut [u, v].into_iter())
        });
        let by_face = r.ground.faces().iter().enumerate().any(|(f, face)| {
            let vs: BTreeSet<VertexId> = face.vertices().collect();
            !vortex_faces.contains(&f) && vs.len() <= 3 && inside(&mut vs.into_iter())
        });
        if by_vertex || by_edge || by_face {
            out.push(AdhesionKind::SmallCell);
        }
        out
    }

    /// The verified case of the adhesion towards child `child` of `t`:
    /// the hint when present, else the first case that holds.
    pub fn classify(&self, t: usize, child: usize) -> std::result::Result<AdhesionKind, String> {
        let s = self.adhesion(t, child);
        let cases = self.adhesion_cases(t, &s);
        let hint = self.bags[t]
            .adhesions
            .iter()
            .find(|a| a.child == child)
            .and_then(|a| a.hint);
        match (hint, cases.first()) {
            (_, None) => Err(format!(
                "adhesion {{{}}} of bag {} matches none of apex, vortex-bag, small-cell",
                names(&s),
                child + 1
            )),
            (Some(h), Some(_)) if !cases.contains(&h) => Err(format!(
                "adhesion {{{}}} of bag {} is not of kind {h}",
                names(&s),
                child + 1
            )),
            (Some(h), _) => Ok(h),
            (None, Some(&k)) => Ok(k),
        }
    }

    pub fn validate(&self) -> Diagnostic {
        let nb = self.bags.len();
        if nb == 0 || self.root >= nb {
            return Err("td: root is not a bag".into());
        }
        if self.tree.len() + 1 != nb {
            return Err("td: a tree on b bags has b - 1 edges".into());
        }
        let mut has_parent = vec![false; nb];
        for &(p, c) in &self.tree {
            if p >= nb || c >= nb || p == c {
                return Err(format!("td: bad tree edge {} {}", p + 1, c + 1));
            }
            if c == self.root || std::mem::replace(&mut has_parent[c], true) {
                return Err(format!("td: bag {} has two parents", c + 1));
            }
        }
        if self.bfs_order().len() != nb {
            return Err("td: tree is not connected".into());
        }
        let g = &self.graph;
        for (t, bag) in self.bags.iter().enumerate() {
            if let Some(&v) = bag.vertices.iter().find(|&&v| v >= g.n()) {
                return Err(format!("bag {}: unknown vertex {}", t + 1, v + 1));
            }
        }
        for v in g.vertices() {
            let holding: Vec<usize> = (0..nb)
                .filter(|&t| self.bags[t].vertices.contains(&v))
                .collect();
            if holding.is_empty() {
                return Err(format!("td: vertex {} in no bag", v + 1));
            }
            let links = self
                .tree
                .iter()
                .filter(|&&(p, c)| holding.contains(&p) && holding.contains(&c))
                .count();
            if links + 1 != holding.len() {
                return Err(format!(
                    "td: bags holding vertex {} are not connected",
                    v + 1
                ));
            }
        }
        for &(u, v) in g.edges() {
            if !self
                .bags
                .iter()
                .any(|b| b.vertices.contains(&u) && b.vertices.contains(&v))
            {
                return Err(format!("td: edge {}-{} in no bag", u + 1, v + 1));
            }
        }
        for t in 0..nb {
            self.validate_bag(t)
                .map_err(|d| format!("bag {}: {d}", t + 1))?;
        }
        for &(p, c) in &self.tree {
            self.classify(p, c)?;
        }
        Ok(())
    }

    fn validate_bag(&self, t: usize) -> Diagnostic {
        let bag = &self.bags[t];
        let r = &bag.rendition;
        r.validate_on_surface()?;
        if bag.map.len() != r.vertex_count() {
            return Err(format!(
                "map: {} entries for {} rendition vertices",
                bag.map.len(),
                r.vertex_count()
            ));
        }
        let image: BTreeSet<VertexId> = bag.map.iter().copied().collect();
        if image.len() != bag.map.len() {
            return Err("map: repeats an input vertex".into());
        }
        if !bag.apex.is_subset(&bag.vertices) {
            return Err("apex: not inside the bag".into());
        }
        if let Some(v) = image.intersection(&bag.apex).next() {
            return Err(format!("map: apex vertex {} is rendered", v + 1));
        }
        let covered: BTreeSet<VertexId> = image.union(&bag.apex).copied().collect();
        if covered != bag.vertices {
            return Err("map: rendition plus apex set is not the bag".into());
        }
        let rendered = self.rendered(t).map_err(|e| e.to_string())?;
        let has = |u: VertexId, v: VertexId| rendered.contains(&(u.min(v), u.max(v)));
        for (j, vx) in r.vortices.iter().enumerate() {
            for (i, x) in vx.decomposition.bags.iter().enumerate() {
                let x: BTreeSet<VertexId> = x.iter().map(|&y| bag.map[y]).collect();
                let gap = pairs(&x).find(|&(u, v)| !has(u, v));
                if let Some((u, v)) = gap {
                    return Err(format!(
                        "vortex {} bag {} is not saturated: {}-{} missing",
                        j + 1,
                        i + 1,
                        u + 1,
                        v + 1
                    ));
                }
            }
        }
        let torso = self.torso(t).map_err(|e| e.to_string())?;
        for &(a, b) in torso.graph.edges() {
            let (u, v) = (torso.vertices[a], torso.vertices[b]);
            if !bag.apex.contains(&u) && !bag.apex.contains(&v) && !has(u, v) {
                return Err(format!("torso edge {}-{} is not rendered", u + 1, v + 1));
            }
        }
        let children = self.children(t);
        for a in &bag.adhesions {
            if !children.contains(&a.child) {
                return Err(format!("adh: bag {} is not a child", a.child + 1));
            }
        }
        for c in children {
            let listed: Vec<&Adhesion> = bag.adhesions.iter().filter(|a| a.child == c).collect();
            let [a] = listed.as_slice() else {
                return Err(format!("adh: child {} needs exactly one line", c + 1));
            };
            let s = self.adhesion(t, c);
            if a.vertices != s {
                return Err(format!(
                    "adh: child {} lists {{{}}}, bags share {{{}}}",
                    c + 1,
                    names(&a.vertices),
                    names(&s)
                ));
            }
        }
        Ok(())
    }
}

/// Measured quantities of one bag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagRecord {
    pub bag: usize,
    pub genus: usize,
    pub apex: usize,
    /// vertices deleted while cutting the surface down to the sphere
    pub deleted: usize,
    pub vortex_width: usize,
    pub breadth: usize,
    /// widest optimal decomposition of a planar piece
    pub base: usize,
    /// width of the bag decomposition in its torso
    pub width: usize,
    /// adhesion vertices of the bag
    pub slack: usize,
}

impl BagRecord {
    pub fn vortex_term(&self) -> usize {
        2 * self.vortex_width * self.breadth + 6 * self.breadth
    }

    /// `base + |A| + |S'| + 2wb + 6b`
    pub fn bound(&self) -> usize {
        self.base + self.apex + self.deleted + self.vortex_term()
    }

    pub fn total(&self) -> usize {
        self.bound() + self.slack
    }
}

/// Per-bag records and the width of the merged decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthLedger {
    pub bags: Vec<BagRecord>,
    pub width: usize,
}

impl WidthLedger {
    pub fn bound(&self) -> usize {
        self.bags.iter().map(BagRecord::total).max().unwrap_or(0)
    }

    pub fn merge_slack(&self) -> usize {
        self.bags.iter().map(|b| b.slack).max().unwrap_or(0)
    }

    pub fn max_genus(&self) -> usize {
        self.bags.iter().map(|b| b.genus).max().unwrap_or(0)
    }

    pub fn holds(&self) -> bool {
        self.width <= self.bound()
    }
}

impl fmt::Display for WidthLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bag genus apex deleted w b base width slack bound")?;
        for r in &self.bags {
            writeln!(
                f,
                "{} {} {} {} {} {} {} {} {} {}",
                r.bag + 1,
                r.genus,
                r.apex,
                r.deleted,
                r.vortex_width,
                r.breadth,
                r.base,
                r.width,
                r.slack,
                r.total()
            )?;
        }
        writeln!(f, "width {} <= bound {}", self.width, self.bound())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub k: usize,
    pub epsilon: f64,
    /// `(t, g_H)` of the excluded minor, for reporting only
    pub excluded_minor: Option<(usize, usize)>,
}

impl PipelineConfig {
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("k must be positive"));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::input("epsilon must be positive"));
        }
        Ok(PipelineConfig {
            k,
            epsilon,
            excluded_minor: None,
        })
    }

    /// Asymptotic form of the width bound for the recorded minor.
    pub fn asymptotic_bound(&self) -> Option<String> {
        self.excluded_minor
            .map(|(t, g)| format!("O({g}*{} + {t}^2304)", self.k))
    }
}

/// A bag decomposition over the torso's edge ids.
#[derive(Clone, Debug)]
pub struct BagDecomposition {
    pub torso: Torso,
    pub bd: BranchDecomposition,
    pub record: BagRecord,
}

#[derive(Clone, Debug)]
pub enum BagOutcome {
    /// Certificate on the bag's ground graph; witness vertex maps and the
    /// apex trace use input vertex ids.
    LowerBound(LowerBoundCertificate),
    Decomposition(BagDecomposition),
}

struct Piece {
    embedding: EmbeddedGraph,
    /// piece vertex -> normalized ground vertex
    vertices: Vec<VertexId>,
    /// piece edge -> normalized ground edge
    edges: Vec<EdgeId>,
}

/// Faces of `e` whose walk is exactly the cycle `boundary`.
fn cycle_faces(e: &EmbeddedGraph, boundary: &[VertexId]) -> Vec<usize> {
    let l = boundary.len();
    e.faces()
        .iter()
        .enumerate()
        .filter(|(_, face)| {
            let walk: Vec<VertexId> = face.vertices().collect();
            walk.len() == l
                && (0..l).any(|r| {
                    (0..l).all(|i| walk[(r + i) % l] == boundary[i])
                        || (0..l).all(|i| walk[(r + l - i) % l] == boundary[i])
                })
        })
        .map(|(f, _)| f)
        .collect()
}

/// Either a certificate that the bag's ground has branchwidth at least
/// `k`, or a decomposition of the torso: cut the ground along short
/// nooses avoiding vortex disks until it is planar, attach the vortices
/// per piece, and extend over the apex set plus the deleted vertices.
pub fn decompose_bag(input: &NearEmbeddingInput, t: usize, k: usize) -> Result<BagOutcome> {
    if k == 0 {
        return Err(Error::input("k must be positive"));
    }
    let bag = input
        .bags
        .get(t)
        .ok_or_else(|| Error::input(format!("no bag {}", t + 1)))?;
    let r = &bag.rendition;
    r.validate_on_surface().map_err(Error::input)?;

    let real: Vec<EdgeId> = r
        .ground
        .graph()
        .edge_ids()
        .filter(|e| !r.auxiliary.contains(e))
        .collect();
    let (ground, sub) = r.ground.edge_induced(&real)?;
    if let Some(mut cert) = certify(&ground, k)? {
        let global = |v: VertexId| bag.map[sub.vertex_map[v]];
        cert.witness.vertex_map = cert.witness.vertex_map.iter().map(|&v| global(v)).collect();
        for entry in &mut cert.apex_trace {
            entry.1 = global(entry.1);
        }
        return Ok(BagOutcome::LowerBound(cert));
    }

    let norm = normalize(r, false)?;
    let g0 = norm.ground.graph();
    let mut alive = vec![true; norm.vortices.len()];
    let mut deleted: BTreeSet<VertexId> = BTreeSet::new();
    let mut pending: Vec<Piece> = Vec::new();
    for comp in g0.components() {
        let (embedding, s) = norm.ground.induced(&comp)?;
        pending.push(Piece {
            embedding,
            vertices: s.vertex_map,
            edges: s.edge_map,
        });
    }
    let mut done: Vec<Piece> = Vec::new();
    while !pending.is_empty() {
        let next = (0..pending.len())
            .max_by_key(|&i| {
                (
                    pending[i].embedding.genus(),
                    std::cmp::Reverse(pending[i].vertices.first().copied()),
                )
            })
            .expect("non-empty");
        let mut piece = pending.swap_remove(next);
        let local: BTreeMap<VertexId, usize> = piece
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let inside: Vec<usize> = (0..norm.vortices.len())
            .filter(|&j| alive[j] && local.contains_key(&norm.vortices[j].society.boundary[0]))
            .collect();
        if piece.embedding.genus() > 0 && inside.is_empty() {
            piece.embedding = reembed_if_planar(piece.embedding);
        }
        if piece.embedding.genus() == 0 {
            done.push(piece);
            continue;
        }
        let emb = &piece.embedding;
        let n = emb.graph().n();
        let mut blocked = vec![false; n + emb.faces().len()];
        let mut disks: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
        for &j in &inside {
            let b: Vec<usize> = norm.vortices[j]
                .society
                .boundary
                .iter()
                .map(|v| local[v])
                .collect();
            let faces = cycle_faces(emb, &b);
            for &x in &b {
                blocked[x] = true;
            }
            for &f in &faces {
                blocked[n + f] = true;
            }
            disks.push((j, b, faces));
        }
        let noose = match shortest_noose_avoiding(emb, &blocked) {
            Representativity::Finite { noose, .. } => noose,
            Representativity::Infinite => match shortest_noncontractible_noose(emb) {
                Representativity::Finite { noose, .. } => noose,
                Representativity::Infinite => {
                    return Err(Error::internal(
                        "positive genus without a non-contractible noose",
                    ))
                }
            },
        };
        let mut cut = noose.vertex_set();
        for (j, b, faces) in &disks {
            let touched =
                b.iter().any(|x| cut.contains(x)) || faces.iter().any(|f| noose.faces.contains(f));
            if touched {
                alive[*j] = false;
                deleted.extend(norm.vortices[*j].society.vertices.iter().copied());
                cut.extend(b.iter().copied());
            }
        }
        deleted.extend(cut.iter().map(|&x| piece.vertices[x]));
        let keep: Vec<VertexId> = (0..n).filter(|x| !cut.contains(x)).collect();
        if keep.is_empty() {
            continue;
        }
        let (rest, s) = emb.induced(&keep)?;
        for comp in rest.graph().components() {
            let (embedding, s2) = rest.induced(&comp)?;
            pending.push(Piece {
                vertices: s2
                    .vertex_map
                    .iter()
                    .map(|&v| piece.vertices[s.vertex_map[v]])
                    .collect(),
                edges: s2
                    .edge_map
                    .iter()
                    .map(|&e| piece.edges[s.edge_map[e]])
                    .collect(),
                embedding,
            });
        }
    }

    let torso = input.torso(t)?;
    let mut parts: Vec<BranchDecomposition> = Vec::new();
    let mut base = 0;
    done.sort_by_key(|p| p.vertices.first().copied());
    for piece in &done {
        let (pr, global) = piece_rendition(piece, &norm, &alive, &bag.map)?;
        let full = pr.full_graph()?;
        if full.graph.m() == 0 {
            continue;
        }
        base = base.max(optimal_planar_decomposition(&pr.ground)?.0);
        let bd = attach_vortices(&pr)?;
        let to_torso: Vec<EdgeId> = full
            .graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                torso
                    .edge(global[u], global[v])
                    .ok_or_else(|| Error::internal("rendered edge missing from the torso"))
            })
            .collect::<Result<_>>()?;
        parts.push(bd.relabel(&to_torso));
    }
    let x: BTreeSet<VertexId> = bag
        .apex
        .iter()
        .copied()
        .chain(deleted.iter().map(|&v| bag.map[v]))
        .map(|v| torso.local(v).expect("bag vertex"))
        .collect();
    let bd = extend_over_apex(&torso.graph, &x, &parts)?;
    validate(&bd, &torso.graph).map_err(|d| Error::internal(format!("bag {}: {d}", t + 1)))?;
    let w = width(&bd, &torso.graph)?;
    let record = BagRecord {
        bag: t,
        genus: r.ground.genus(),
        apex: bag.apex.len(),
        deleted: deleted.len(),
        vortex_width: r.max_width(),
        breadth: r.breadth(),
        base,
        width: w,
        slack: input.adhesion_vertices(t).len(),
    };
    Ok(BagOutcome::Decomposition(BagDecomposition {
        torso,
        bd,
        record,
    }))
}

/// Sphere rendition of a planar piece with its surviving vortices, and the
/// input vertex of every rendition vertex.
fn piece_rendition(
    piece: &Piece,
    norm: &SphereRendition,
    alive: &[bool],
    map: &[VertexId],
) -> Result<(SphereRendition, Vec<VertexId>)> {
    let mut local: BTreeMap<VertexId, usize> = piece
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut global: Vec<VertexId> = piece.vertices.iter().map(|&v| map[v]).collect();
    let mut vortices = Vec::new();
    for (j, vx) in norm.vortices.iter().enumerate() {
        if !alive[j] || !local.contains_key(&vx.society.boundary[0]) {
            continue;
        }
        for v in vx.society.interior() {
            local.insert(v, global.len());
            global.push(map[v]);
        }
        let to = |v: &VertexId| local[v];
        let boundary: Vec<VertexId> = vx.society.boundary.iter().map(to).collect();
        let edges: Vec<(VertexId, VertexId)> = vx
            .society
            .labelled_edges()
            .iter()
            .map(|(u, v)| (to(u), to(v)))
            .collect();
        let face = *cycle_faces(&piece.embedding, &boundary)
            .first()
            .ok_or_else(|| Error::internal("vortex disk lost its face"))?;
        vortices.push(Vortex {
            face,
            society: Society::new(&edges, boundary)?,
            decomposition: LinearDecomposition {
                order: vx.decomposition.order.iter().map(to).collect(),
                bags: vx
                    .decomposition
                    .bags
                    .iter()
                    .map(|b| b.iter().map(to).collect())
                    .collect(),
            },
            cycle_decomposition: None,
        });
    }
    let auxiliary = piece
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| norm.auxiliary.contains(e))
        .map(|(i, _)| i)
        .collect();
    let pr = SphereRendition {
        ground: piece.embedding.clone(),
        vortices,
        auxiliary,
    };
    pr.validate()
        .map_err(|d| Error::internal(format!("piece rendition: {d}")))?;
    Ok((pr, global))
}

/// Least torso edge with both ends in `rest`, else least edge at `rest`.
fn anchor_edge(torso: &Torso, rest: &BTreeSet<VertexId>) -> Option<EdgeId> {
    let inside = |v: usize| rest.contains(&torso.vertices[v]);
    let edges = torso.graph.edges();
    (0..edges.len())
        .find(|&e| inside(edges[e].0) && inside(edges[e].1))
        .or_else(|| (0..edges.len()).find(|&e| inside(edges[e].0) || inside(edges[e].1)))
}

fn least_leaf(bd: &BranchDecomposition) -> Option<usize> {
    bd.leaves()
        .into_iter()
        .min_by_key(|&(_, e)| e)
        .map(|(u, _)| u)
}

/// Glue the bag decompositions bottom-up. Apex-kind children hang next
/// to the least leaf of the parent bag; the others next to the leaf of
/// an edge inside (else at) the adhesion set minus the apex set. Torso
/// edges that are not input edges owned by their bag are dropped.
pub fn merge_decompositions(
    input: &NearEmbeddingInput,
    parts: &[BagDecomposition],
) -> Result<(BranchDecomposition, WidthLedger)> {
    let nb = input.bags.len();
    if parts.len() != nb {
        return Err(Error::input("one decomposition per bag is required"));
    }
    let order = input.bfs_order();
    let mut depth = vec![0usize; nb];
    for &t in &order {
        for c in input.children(t) {
            depth[c] = depth[t] + 1;
        }
    }
    let g = &input.graph;
    let owner: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            (0..nb)
                .filter(|&t| {
                    input.bags[t].vertices.contains(&u) && input.bags[t].vertices.contains(&v)
                })
                .min_by_key(|&t| (depth[t], t))
                .expect("edge in some bag")
        })
        .collect();
    let mut offset = vec![0usize; nb];
    let mut label: Vec<Option<EdgeId>> = Vec::new();
    for t in 0..nb {
        offset[t] = label.len();
        let torso = &parts[t].torso;
        for &(a, b) in torso.graph.edges() {
            let (u, v) = (torso.vertices[a], torso.vertices[b]);
            label.push(g.edge_between(u, v).filter(|&e| owner[e] == t));
        }
    }
    let mut merged: Vec<Option<BranchDecomposition>> = vec![None; nb];
    for &t in order.iter().rev() {
        let own: Vec<EdgeId> = (0..parts[t].torso.graph.m())
            .map(|e| offset[t] + e)
            .collect();
        let mut host = parts[t].bd.relabel(&own);
        let home = least_leaf(&host).map(|u| host.leaf_edge(u).expect("leaf"));
        for c in input.children(t) {
            let child = merged[c].take().expect("children first");
            if child.node_count() == 0 {
                continue;
            }
            if host.node_count() == 0 {
                host = child;
                continue;
            }
            let kind = input.classify(t, c).map_err(Error::input)?;
            let rest: BTreeSet<VertexId> = input
                .adhesion(t, c)
                .difference(&input.bags[t].apex)
                .copied()
                .collect();
            let anchored = match kind {
                AdhesionKind::Apex => None,
                _ => anchor_edge(&parts[t].torso, &rest).map(|e| offset[t] + e),
            };
            let target = anchored
                .or(home)
                .or_else(|| least_leaf(&host).map(|u| host.leaf_edge(u).expect("leaf")))
                .expect("non-empty host");
            let at = host.leaf_of(target).expect("anchor leaf");
            let child_at = least_leaf(&child).expect("non-empty child");
            splice(&mut host, at, &child, child_at);
        }
        merged[t] = Some(host);
    }
    let mut bd = merged[input.root].take().expect("root merged");
    bd.remove_leaves(|l| label[l].is_none());
    let relabel: Vec<EdgeId> = label.iter().map(|l| l.unwrap_or(usize::MAX)).collect();
    let bd = bd.relabel(&relabel);
    validate(&bd, g).map_err(|d| Error::internal(format!("merged decomposition: {d}")))?;
    let w = width(&bd, g)?;
    let ledger = WidthLedger {
        bags: parts.iter().map(|p| p.record.clone()).collect(),
        width: w,
    };
    Ok((bd, ledger))
}

#[derive(Clone, Debug)]
pub enum PipelineOutcome {
    LowerBound {
        bag: usize,
        certificate: LowerBoundCertificate,
    },
    Decomposition {
        bd: BranchDecomposition,
        ledger: WidthLedger,
    },
}

/// Decompose every bag (in parallel) and merge. A certificate of any bag
/// becomes the verdict `bw >= k`, provided no adhesion set exceeds `k`.
pub fn pipeline(input: &NearEmbeddingInput, k: usize) -> Result<PipelineOutcome> {
    let out = run(input, k)?;
    if let PipelineOutcome::LowerBound { bag, .. } = &out {
        let adh = input.max_adhesion();
        if adh > k {
            return Err(Error::contract(format!(
                "bag {} certifies bw >= {k}, but an adhesion set of size {adh} exceeds k",
                bag + 1
            )));
        }
    }
    Ok(out)
}

fn run(input: &NearEmbeddingInput, k: usize) -> Result<PipelineOutcome> {
    if k == 0 {
        return Err(Error::input("k must be positive"));
    }
    input.validate().map_err(Error::input)?;
    let outcomes: Vec<Result<BagOutcome>> = (0..input.bags.len())
        .into_par_iter()
        .map(|t| decompose_bag(input, t, k))
        .collect();
    let mut parts = Vec::new();
    for (t, o) in outcomes.into_iter().enumerate() {
        match o? {
            BagOutcome::LowerBound(certificate) => {
                return Ok(PipelineOutcome::LowerBound {
                    bag: t,
                    certificate,
                })
            }
            BagOutcome::Decomposition(d) => parts.push(d),
        }
    }
    let (bd, ledger) = merge_decompositions(input, &parts)?;
    Ok(PipelineOutcome::Decomposition { bd, ledger })
}

#[derive(Clone, Debug)]
pub struct EptasResult {
    pub value: usize,
    /// largest certified `k`
    pub lower_bound: usize,
    /// width of the decomposition built for `lower_bound + 1`
    pub upper_bound: usize,
    /// `ledger bound - (g + 1) * lower_bound`, floored at 0
    pub additive: usize,
    pub exact: bool,
    pub bd: BranchDecomposition,
    pub ledger: WidthLedger,
}

impl EptasResult {
    /// `upper_bound / lower_bound`; infinite when nothing was certified.
    pub fn measured_ratio(&self) -> f64 {
        if self.lower_bound == 0 {
            if self.upper_bound == 0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.upper_bound as f64 / self.lower_bound as f64
        }
    }
}

/// Largest certified `b`; returned as is when the measured additive
/// constant `c` satisfies `c < eps * b` (or `c = 0`), otherwise replaced
/// by the exact branchwidth from the oracle.
pub fn eptas_bw(input: &NearEmbeddingInput, epsilon: f64) -> Result<EptasResult> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::input("epsilon must be positive"));
    }
    let mut k = 1;
    let (bd, ledger) = loop {
        match run(input, k)? {
            PipelineOutcome::LowerBound { .. } => k += 1,
            PipelineOutcome::Decomposition { bd, ledger } => break (bd, ledger),
        }
    };
    let b = k - 1;
    let additive = ledger.bound().saturating_sub((ledger.max_genus() + 1) * b);
    let upper = ledger.width;
    let approximate = additive == 0 || (additive as f64) < epsilon * b as f64;
    let (value, exact) = if approximate {
        (b, false)
    } else {
        let m = input.graph.m();
        if m > EXACT_FALLBACK_EDGES {
            return Err(Error::ExactFallbackExceeded(format!(
                "additive constant {additive} is not below {epsilon} * {b} and {m} edges exceed the oracle budget of {EXACT_FALLBACK_EDGES}"
            )));
        }
        (
            exact_bw(&input.graph, OracleMode::BranchAndBound)?.exact_bw,
            true,
        )
    };
    Ok(EptasResult {
        value,
        lower_bound: b,
        upper_bound: upper,
        additive,
        exact,
        bd,
        ledger,
    })
}

fn write_set(out: &mut String, head: &str, xs: impl IntoIterator<Item = VertexId>) {
    out.push_str(head);
    for x in xs {
        let _ = write!(out, " {}", x + 1);
    }
    out.push('\n');
}

/// Graph block, `td <bags> <root>`, `tree <parent> <child>`,
/// `bag <i> <v..>`, `apex <i> <v..>`, `map <i> <v..>`,
/// `adh <parent> <child> [kind] <v..>`, then per bag a
/// `rendition <i>` .. `end` block (all 1-indexed).
pub fn serialize_near_embedding(input: &NearEmbeddingInput) -> String {
    let mut out = serialize_graph(&input.graph);
    let _ = writeln!(out, "td {} {}", input.bags.len(), input.root + 1);
    for &(p, c) in &input.tree {
        let _ = writeln!(out, "tree {} {}", p + 1, c + 1);
    }
    for (t, bag) in input.bags.iter().enumerate() {
        write_set(
            &mut out,
            &format!("bag {}", t + 1),
            bag.vertices.iter().copied(),
        );
        write_set(
            &mut out,
            &format!("apex {}", t + 1),
            bag.apex.iter().copied(),
        );
        write_set(&mut out, &format!("map {}", t + 1), bag.map.iter().copied());
        for a in &bag.adhesions {
            let mut head = format!("adh {} {}", t + 1, a.child + 1);
            if let Some(h) = a.hint {
                head.push(' ');
                head.push_str(h.keyword());
            }
            write_set(&mut out, &head, a.vertices.iter().copied());
        }
    }
    for (t, bag) in input.bags.iter().enumerate() {
        let _ = writeln!(out, "rendition {}", t + 1);
        out.push_str(&serialize_rendition(&bag.rendition));
        out.push_str("end\n");
    }
    out
}

pub fn parse_near_embedding(text: &str) -> Result<NearEmbeddingInput> {
    let all: Vec<&str> = text.lines().collect();
    let mut lines = all.iter().copied().enumerate().map(|(i, l)| (i + 1, l));
    let (graph, mut pending) = parse_graph_lines(&mut lines, None)?;
    let mut header: Option<(usize, usize)> = None;
    let mut tree = Vec::new();
    struct Raw {
        vertices: Option<BTreeSet<VertexId>>,
        apex: BTreeSet<VertexId>,
        map: Vec<VertexId>,
        adhesions: Vec<Adhesion>,
        rendition: Option<SphereRendition>,
    }
    let mut raws: Vec<Raw> = Vec::new();
    while let Some((no, line)) = pending.take().or_else(|| lines.next()) {
        let t = line.trim();
        if t.is_empty() || t == "c" || t.starts_with("c ") {
            continue;
        }
        let mut words = t.split_whitespace();
        let key = words.next().unwrap_or_default();
        let one_based = |w: Option<&str>| -> Result<usize> {
            let v: usize = parse_num(no, w)?;
            if v == 0 {
                return Err(Error::parse(no, "ids start at 1"));
            }
            Ok(v - 1)
        };
        if key == "td" {
            if header.is_some() {
                return Err(Error::parse(no, "second 'td' line"));
            }
            let count: usize = parse_num(no, words.next())?;
            let root = one_based(words.next())?;
            if count == 0 || root >= count {
                return Err(Error::parse(no, "root out of range"));
            }
            header = Some((count, root));
            raws = (0..count)
                .map(|_| Raw {
                    vertices: None,
                    apex: BTreeSet::new(),
                    map: Vec::new(),
                    adhesions: Vec::new(),
                    rendition: None,
                })
                .collect();
            continue;
        }
        let Some((count, _)) = header else {
            return Err(Error::parse(no, format!("'{key}' before the 'td' line")));
        };
        let bag_id = |w: Option<&str>| -> Result<usize> {
            let b = one_based(w)?;
            if b >= count {
                return Err(Error::parse(no, "bag out of range"));
            }
            Ok(b)
        };
        let vertex = |w: &str| -> Result<VertexId> {
            let v = one_based(Some(w))?;
            if v >= graph.n() {
                return Err(Error::parse(no, "vertex out of range"));
            }
            Ok(v)
        };
        match key {
            "tree" => {
                let p = bag_id(words.next())?;
                let c = bag_id(words.next())?;
                tree.push((p, c));
            }
            "bag" | "apex" | "map" => {
                let b = bag_id(words.next())?;
                let vs: Vec<VertexId> = words.map(vertex).collect::<Result<_>>()?;
                let raw = &mut raws[b];
                match key {
                    "bag" => raw.vertices = Some(vs.into_iter().collect()),
                    "apex" => raw.apex = vs.into_iter().collect(),
                    _ => raw.map = vs,
                }
            }
            "adh" => {
                let p = bag_id(words.next())?;
                let c = bag_id(words.next())?;
                let mut rest = words.peekable();
                let hint = match rest.peek() {
                    Some(w) if w.parse::<usize>().is_err() => {
                        let h = AdhesionKind::from_keyword(w).ok_or_else(|| {
                            Error::parse(no, format!("unknown adhesion kind '{w}'"))
                        })?;
                        rest.next();
                        Some(h)
                    }
                    _ => None,
                };
                let vertices = rest.map(vertex).collect::<Result<_>>()?;
                raws[p].adhesions.push(Adhesion {
                    child: c,
                    vertices,
                    hint,
                });
            }
            "rendition" => {
                let b = bag_id(words.next())?;
                let start = no;
                let mut body = String::new();
                let mut closed = false;
                for (_, l) in lines.by_ref() {
                    if l.trim() == "end" {
                        closed = true;
                        break;
                    }
                    body.push_str(l);
                    body.push('\n');
                }
                if !closed {
                    return Err(Error::parse(start, "rendition block without 'end'"));
                }
                let r = parse_surface_rendition(&body).map_err(|e| match e {
                    Error::Parse { line, msg } => Error::parse(start + line, msg),
                    other => Error::parse(start, other.to_string()),
                })?;
                raws[b].rendition = Some(r);
            }
            _ => return Err(Error::parse(no, format!("unexpected line '{t}'"))),
        }
    }
    let Some((_, root)) = header else {
        return Err(Error::parse(all.len().max(1), "missing 'td' line"));
    };
    let mut bags = Vec::new();
    for (t, raw) in raws.into_iter().enumerate() {
        let missing = |what: &str| Error::input(format!("bag {}: missing {what}", t + 1));
        bags.push(Bag {
            vertices: raw.vertices.ok_or_else(|| missing("'bag' line"))?,
            apex: raw.apex,
            map: raw.map,
            adhesions: raw.adhesions,
            rendition: raw.rendition.ok_or_else(|| missing("rendition block"))?,
        });
    }
    let input = NearEmbeddingInput {
        graph,
        root,
        tree,
        bags,
    };
    input.validate().map_err(Error::input)?;
    Ok(input)
}
