//! Societies, linear decompositions, sphere renditions with vortex faces,
//! and reattaching vortices to a decomposition of the ground graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::branchdecomp::{splice, star_forest_decomposition, validate, BranchDecomposition};
use crate::error::{Error, Result};
use crate::graph::{parse_graph_lines, parse_num, EdgeId, Graph, VertexId};
use crate::ratcatcher::optimal_planar_decomposition;
use crate::surface::{parse_rotation_lines, serialize_embedding, EmbeddedGraph, Side};
use crate::Diagnostic;

/// A graph with a cyclic order on some of its vertices. Vertex labels are
/// global: `vertices[i]` is the label of local vertex `i` of `graph`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Society {
    pub graph: Graph,
    pub vertices: Vec<VertexId>,
    pub boundary: Vec<VertexId>,
}

impl Society {
    /// Society on the given labelled edges; the vertex set is the boundary
    /// plus all edge ends.
    pub fn new(edges: &[(VertexId, VertexId)], boundary: Vec<VertexId>) -> Result<Self> {
        let distinct: BTreeSet<VertexId> = boundary.iter().copied().collect();
        if distinct.len() != boundary.len() {
            return Err(Error::input("society boundary repeats a vertex"));
        }
        let mut vertices: Vec<VertexId> = boundary
            .iter()
            .copied()
            .chain(edges.iter().flat_map(|&(u, v)| [u, v]))
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::input("society needs a vertex"));
        }
        let local = |x: VertexId| vertices.binary_search(&x).expect("listed");
        let pairs: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (local(u), local(v))).collect();
        let graph = Graph::from_edges(vertices.len(), &pairs)?;
        Ok(Society {
            graph,
            vertices,
            boundary,
        })
    }

    pub fn local(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Edges as pairs of global labels, in local edge order.
    pub fn labelled_edges(&self) -> Vec<(VertexId, VertexId)> {
        self.graph
            .edges()
            .iter()
            .map(|&(u, v)| (self.vertices[u], self.vertices[v]))
            .collect()
    }

    pub fn interior(&self) -> Vec<VertexId> {
        let b: BTreeSet<VertexId> = self.boundary.iter().copied().collect();
        self.vertices
            .iter()
            .copied()
            .filter(|v| !b.contains(v))
            .collect()
    }
}

/// Bags `X_1..X_n` along a linearization `v_1..v_n` of a society boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDecomposition {
    pub order: Vec<VertexId>,
    pub bags: Vec<BTreeSet<VertexId>>,
}

impl LinearDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn adhesion(&self) -> usize {
        self.bags
            .windows(2)
            .map(|w| w[0].intersection(&w[1]).count())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearStats {
    pub width: usize,
    pub adhesion: usize,
}

pub fn validate_linear_decomposition(
    ld: &LinearDecomposition,
    s: &Society,
) -> std::result::Result<LinearStats, String> {
    let n = s.boundary.len();
    let is_rotation = ld.order.len() == n
        && (0..n.max(1)).any(|r| (0..n).all(|i| ld.order[i] == s.boundary[(i + r) % n]));
    if !is_rotation {
        return Err("order: not a linearization of the boundary".into());
    }
    if ld.bags.len() != n {
        return Err(format!("bags: expected {n}, found {}", ld.bags.len()));
    }
    for (i, (v, bag)) in ld.order.iter().zip(&ld.bags).enumerate() {
        if !bag.contains(v) {
            return Err(format!("bag {} misses its vertex {}", i + 1, v + 1));
        }
        if let Some(x) = bag.iter().find(|&&x| s.local(x).is_none()) {
            return Err(format!("bag {} names unknown vertex {}", i + 1, x + 1));
        }
    }
    let mut span: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (i, bag) in ld.bags.iter().enumerate() {
        for &x in bag {
            span.entry(x).or_default().push(i);
        }
    }
    for &v in &s.vertices {
        match span.get(&v) {
            None => return Err(format!("vertex coverage: vertex {} in no bag", v + 1)),
            Some(idx) => {
                if idx[idx.len() - 1] - idx[0] + 1 != idx.len() {
                    return Err(format!("interval: vertex {} skips a bag", v + 1));
                }
            }
        }
    }
    for (u, v) in s.labelled_edges() {
        if !ld.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return Err(format!("edge coverage: edge {}-{} in no bag", u + 1, v + 1));
        }
    }
    Ok(LinearStats {
        width: ld.width(),
        adhesion: ld.adhesion(),
    })
}

/// A vortex drawn in face `face` of the ground embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vortex {
    pub face: usize,
    pub society: Society,
    pub decomposition: LinearDecomposition,
    /// Width-3 decomposition `{v1, vi, vi+1}` of the boundary cycle,
    /// recorded by normalization.
    pub cycle_decomposition: Option<LinearDecomposition>,
}

/// Ground graph in the sphere plus vortices. Ground vertices are
/// `0..ground.n()`; vortex interiors use fresh labels above that.
#[derive(Clone, Debug)]
pub struct SphereRendition {
    pub ground: EmbeddedGraph,
    pub vortices: Vec<Vortex>,
    /// Ground edges added by normalization that are not edges of the
    /// rendered graph.
    pub auxiliary: BTreeSet<EdgeId>,
}

/// The rendered graph: ground edges (minus auxiliary ones) first, then
/// vortex edges not already present.
#[derive(Clone, Debug)]
pub struct RenditionGraph {
    pub graph: Graph,
    /// ground edge -> rendered edge
    pub ground_edge: Vec<Option<EdgeId>>,
    /// per vortex, society edge -> rendered edge
    pub vortex_edges: Vec<Vec<EdgeId>>,
}

impl SphereRendition {
    pub fn new(ground: EmbeddedGraph, vortices: Vec<Vortex>) -> Self {
        SphereRendition {
            ground,
            vortices,
            auxiliary: BTreeSet::new(),
        }
    }

    pub fn breadth(&self) -> usize {
        self.vortices.len()
    }

    /// Largest bag over all vortex decompositions.
    pub fn max_width(&self) -> usize {
        self.vortices
            .iter()
            .map(|v| v.decomposition.width())
            .max()
            .unwrap_or(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.vortices
            .iter()
            .flat_map(|v| v.society.vertices.iter())
            .map(|&x| x + 1)
            .max()
            .unwrap_or(0)
            .max(self.ground.graph().n())
    }

    pub fn full_graph(&self) -> Result<RenditionGraph> {
        let g0 = self.ground.graph();
        let mut graph = Graph::new(self.vertex_count().max(1))?;
        let mut ground_edge = vec![None; g0.m()];
        for (e, &(u, v)) in g0.edges().iter().enumerate() {
            if !self.auxiliary.contains(&e) {
                ground_edge[e] = Some(graph.add_edge(u, v)?);
            }
        }
        let mut vortex_edges = Vec::new();
        for vx in &self.vortices {
            let mut ids = Vec::new();
            for (u, v) in vx.society.labelled_edges() {
                let id = match graph.edge_between(u, v) {
                    Some(id) => id,
                    None => graph.add_edge(u, v)?,
                };
                ids.push(id);
            }
            vortex_edges.push(ids);
        }
        Ok(RenditionGraph {
            graph,
            ground_edge,
            vortex_edges,
        })
    }

    /// The rendered graph with every vortex interior deleted.
    pub fn stripped_graph(&self) -> Result<Graph> {
        let full = self.full_graph()?;
        let interior: BTreeSet<VertexId> = self
            .vortices
            .iter()
            .flat_map(|v| v.society.interior())
            .collect();
        let keep: Vec<VertexId> = full
            .graph
            .vertices()
            .filter(|v| !interior.contains(v))
            .collect();
        if keep.is_empty() {
            return Graph::new(1);
        }
        Ok(full.graph.induced(&keep)?.graph)
    }

    /// Every pair of consecutive boundary vertices is adjacent in the ground.
    pub fn is_normalized(&self) -> bool {
        let g0 = self.ground.graph();
        self.vortices.iter().all(|vx| {
            let b = &vx.society.boundary;
            (0..b.len()).all(|i| g0.edge_between(b[i], b[(i + 1) % b.len()]).is_some())
        })
    }

    pub fn validate(&self) -> Diagnostic {
        self.check(true)
    }

    /// [`validate`](Self::validate) without the genus-0 requirement.
    pub(crate) fn validate_on_surface(&self) -> Diagnostic {
        self.check(false)
    }

    fn check(&self, sphere: bool) -> Diagnostic {
        let g0 = self.ground.graph();
        if sphere && self.ground.genus() != 0 {
            return Err("ground embedding must have genus 0".into());
        }
        if let Some(&e) = self.auxiliary.iter().find(|&&e| e >= g0.m()) {
            return Err(format!("auxiliary edge {} is not a ground edge", e + 1));
        }
        let mut faces = BTreeSet::new();
        let mut interiors = BTreeSet::new();
        for (j, vx) in self.vortices.iter().enumerate() {
            let name = j + 1;
            if vx.face >= self.ground.faces().len() {
                return Err(format!("vortex {name}: unknown face {}", vx.face + 1));
            }
            if !faces.insert(vx.face) {
                return Err(format!(
                    "vortex {name}: face {} already holds a vortex",
                    vx.face + 1
                ));
            }
            let b = &vx.society.boundary;
            if b.len() < 3 {
                return Err(format!("vortex {name}: boundary needs three vertices"));
            }
            if let Some(&v) = b.iter().find(|&&v| v >= g0.n()) {
                return Err(format!(
                    "vortex {name}: boundary vertex {} is not in the ground",
                    v + 1
                ));
            }
            for v in vx.society.interior() {
                if v < g0.n() {
                    return Err(format!(
                        "vortex {name}: interior vertex {} lies in the ground",
                        v + 1
                    ));
                }
                if !interiors.insert(v) {
                    return Err(format!(
                        "vortex {name}: interior vertex {} is shared",
                        v + 1
                    ));
                }
            }
            let walk: Vec<VertexId> = self.ground.faces()[vx.face].vertices().collect();
            if boundary_positions(&walk, b).is_none() {
                return Err(format!(
                    "vortex {name}: boundary order does not follow face {}",
                    vx.face + 1
                ));
            }
            validate_linear_decomposition(&vx.decomposition, &vx.society)
                .map_err(|d| format!("vortex {name}: {d}"))?;
        }
        Ok(())
    }
}

/// Positions of `boundary` as a cyclic subsequence of the face walk,
/// trying both walk directions.
fn boundary_positions(walk: &[VertexId], boundary: &[VertexId]) -> Option<Vec<usize>> {
    let l = walk.len();
    for forward in [true, false] {
        let at = |k: usize| if forward { k % l } else { (l - k % l) % l };
        for start in 0..l {
            if walk[at(start)] != boundary[0] {
                continue;
            }
            let mut pos = vec![at(start)];
            let mut k = start;
            for &v in &boundary[1..] {
                let limit = start + l;
                k += 1;
                while k < limit && walk[at(k)] != v {
                    k += 1;
                }
                if k >= limit {
                    break;
                }
                pos.push(at(k));
            }
            if pos.len() == boundary.len() {
                return Some(pos);
            }
        }
    }
    None
}

fn face_of(e: &EmbeddedGraph, s: Side) -> Option<usize> {
    e.locate(s)
        .or_else(|| e.locate(e.map().reverse(s)))
        .map(|(f, _)| f)
}

/// Make every vortex boundary a cycle of the ground by drawing the missing
/// edges `v_i v_{i+1}` inside the vortex face. A society edge between the
/// two becomes the drawn edge; otherwise the new edge is auxiliary.
pub fn normalize_vortex_boundary(r: &SphereRendition) -> Result<SphereRendition> {
    normalize(r, true)
}

pub(crate) fn normalize(r: &SphereRendition, sphere: bool) -> Result<SphereRendition> {
    r.check(sphere).map_err(Error::contract)?;
    let mut ground = r.ground.clone();
    let mut auxiliary = r.auxiliary.clone();
    let mut anchors: Vec<Side> = r
        .vortices
        .iter()
        .map(|vx| ground.faces()[vx.face].sides[0].side)
        .collect();
    let mut vortices = r.vortices.clone();
    for j in 0..vortices.len() {
        let b = vortices[j].society.boundary.clone();
        let l = b.len();
        for i in 0..l {
            let (a, c) = (b[i], b[(i + 1) % l]);
            if ground.graph().edge_between(a, c).is_some() {
                continue;
            }
            let f = face_of(&ground, anchors[j]).expect("anchor on a face");
            let face = &ground.faces()[f];
            let walk: Vec<VertexId> = face.vertices().collect();
            let pos = boundary_positions(&walk, &b)
                .ok_or_else(|| Error::internal("boundary left its face"))?;
            let (from, to) = (face.sides[pos[i]].side, face.sides[pos[(i + 1) % l]].side);
            let (rot, new) = ground.rotation().with_chord(from, to)?;
            let next = EmbeddedGraph::new(rot)?;
            if next.genus() != r.ground.genus() {
                return Err(Error::internal("boundary chord changed the genus"));
            }
            // the part of the split face that still carries the whole boundary
            let inner = [
                Side {
                    dart: 2 * new,
                    orient: 1,
                },
                Side {
                    dart: 2 * new + 1,
                    orient: 1,
                },
            ]
            .into_iter()
            .chain([
                Side {
                    dart: 2 * new,
                    orient: -1,
                },
                Side {
                    dart: 2 * new + 1,
                    orient: -1,
                },
            ])
            .filter_map(|s| next.locate(s).map(|(f, p)| (f, s, p)))
            .find(|&(f, _, _)| {
                let w: Vec<VertexId> = next.faces()[f].vertices().collect();
                boundary_positions(&w, &b).is_some()
            })
            .ok_or_else(|| Error::internal("no face keeps the vortex boundary"))?;
            anchors[j] = inner.1;
            let real = vortices[j]
                .society
                .local(a)
                .zip(vortices[j].society.local(c));
            let pushed =
                real.is_some_and(|(x, y)| vortices[j].society.graph.edge_between(x, y).is_some());
            if !pushed {
                auxiliary.insert(new);
            }
            ground = next;
        }
    }
    for (vx, &anchor) in vortices.iter_mut().zip(&anchors) {
        vx.face = face_of(&ground, anchor).expect("anchor on a face");
        vx.cycle_decomposition = Some(cycle_decomposition(&vx.decomposition.order));
    }
    Ok(SphereRendition {
        ground,
        vortices,
        auxiliary,
    })
}

/// `X_i = {v1, v_i, v_{i+1}}` for `i < l` and `X_l = {v1, v_l}`.
fn cycle_decomposition(order: &[VertexId]) -> LinearDecomposition {
    let l = order.len();
    let bags = (0..l)
        .map(|i| {
            let mut bag: BTreeSet<VertexId> = [order[0], order[i]].into_iter().collect();
            if i + 1 < l {
                bag.insert(order[i + 1]);
            }
            bag
        })
        .collect();
    LinearDecomposition {
        order: order.to_vec(),
        bags,
    }
}

/// Decomposition of the rendered graph (leaves labelled by
/// `full_graph()` edge ids). Every vortex edge set `E_i` (edges first
/// covered by bag `i`) hangs as a caterpillar next to the leaf of the
/// boundary edge `v_i v_{i+1}` in an optimal decomposition of the ground.
pub fn attach_vortices(r: &SphereRendition) -> Result<BranchDecomposition> {
    r.validate().map_err(Error::contract)?;
    if !r.is_normalized() {
        return Err(Error::contract("rendition is not normalized"));
    }
    let full = r.full_graph()?;
    if full.graph.is_star_forest() {
        return Ok(star_forest_decomposition(&full.graph));
    }
    let g0 = r.ground.graph();
    let (_, mut bd) = optimal_planar_decomposition(&r.ground)?;
    // leaf labels: ground edges, then vortex edges off the ground
    let mut label: Vec<Option<EdgeId>> = full.ground_edge.clone();
    for (vx, ids) in r.vortices.iter().zip(&full.vortex_edges) {
        let mut assigned = vec![false; ids.len()];
        let edges = vx.society.labelled_edges();
        let order = &vx.decomposition.order;
        let l = order.len();
        for (i, bag) in vx.decomposition.bags.iter().enumerate() {
            let mut part: Vec<EdgeId> = Vec::new();
            for (k, &(u, v)) in edges.iter().enumerate() {
                if assigned[k] || !bag.contains(&u) || !bag.contains(&v) {
                    continue;
                }
                assigned[k] = true;
                if u < g0.n() && v < g0.n() && g0.edge_between(u, v).is_some() {
                    continue;
                }
                part.push(ids[k]);
            }
            if part.is_empty() {
                continue;
            }
            part.sort_unstable();
            let labels: Vec<EdgeId> = part
                .iter()
                .map(|&id| {
                    label.push(Some(id));
                    label.len() - 1
                })
                .collect();
            let cat = BranchDecomposition::caterpillar(&labels);
            let boundary_edge = g0
                .edge_between(order[i], order[(i + 1) % l])
                .expect("normalized boundary");
            let at = bd.leaf_of(boundary_edge).expect("ground leaf");
            let child_at = cat.leaf_of(labels[0]).expect("caterpillar leaf");
            splice(&mut bd, at, &cat, child_at);
        }
    }
    bd.remove_leaves(|x| label[x].is_none());
    let relabel: Vec<EdgeId> = label.iter().map(|x| x.unwrap_or(usize::MAX)).collect();
    let bd = bd.relabel(&relabel);
    validate(&bd, &full.graph).map_err(|d| Error::internal(format!("vortex attachment: {d}")))?;
    Ok(bd)
}

/// `bw(G') + 2wb + 6b` for a given `bw(G')`.
pub fn vortex_width_bound(stripped_bw: usize, r: &SphereRendition) -> usize {
    let (w, b) = (r.max_width(), r.breadth());
    stripped_bw + 2 * w * b + 6 * b
}

/// Ground embedding, `aux <e>` lines, then per vortex `vortex <face>`,
/// `society <v..>`, `ve <u> <v>` and `bag <i> <v..>` lines (1-indexed).
pub fn serialize_rendition(r: &SphereRendition) -> String {
    let mut out = serialize_embedding(&r.ground);
    for &e in &r.auxiliary {
        let _ = writeln!(out, "aux {}", e + 1);
    }
    for vx in &r.vortices {
        let _ = writeln!(out, "vortex {}", vx.face + 1);
        let _ = write!(out, "society");
        for &v in &vx.decomposition.order {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
        for (u, v) in vx.society.labelled_edges() {
            let _ = writeln!(out, "ve {} {}", u + 1, v + 1);
        }
        for (i, bag) in vx.decomposition.bags.iter().enumerate() {
            let _ = write!(out, "bag {}", i + 1);
            for &v in bag {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_rendition(text: &str) -> Result<SphereRendition> {
    parse_with(text, true)
}

/// Parse a rendition whose ground may have positive genus.
pub(crate) fn parse_surface_rendition(text: &str) -> Result<SphereRendition> {
    parse_with(text, false)
}

fn parse_with(text: &str, sphere: bool) -> Result<SphereRendition> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (g, next) = parse_graph_lines(&mut lines, None)?;
    let (ground, rest) = parse_rotation_lines(g, &mut lines, next)?;
    let mut auxiliary = BTreeSet::new();
    struct Raw {
        face: usize,
        boundary: Vec<VertexId>,
        edges: Vec<(VertexId, VertexId)>,
        bags: Vec<BTreeSet<VertexId>>,
        line: usize,
    }
    let mut raws: Vec<Raw> = Vec::new();
    let mut pending = rest;
    while let Some((no, line)) = pending.take().or_else(|| lines.next()) {
        let t = line.trim();
        if t.is_empty() || t == "c" || t.starts_with("c ") {
            continue;
        }
        let mut words = t.split_whitespace();
        let key = words.next().unwrap_or_default();
        let vertex = |w: &str| -> Result<VertexId> {
            let v: usize = parse_num(no, Some(w))?;
            if v == 0 {
                return Err(Error::parse(no, "vertex ids start at 1"));
            }
            Ok(v - 1)
        };
        match key {
            "aux" => {
                let e: usize = parse_num(no, words.next())?;
                if e == 0 || e > ground.graph().m() {
                    return Err(Error::parse(no, "auxiliary edge out of range"));
                }
                auxiliary.insert(e - 1);
            }
            "vortex" => {
                let f: usize = parse_num(no, words.next())?;
                if f == 0 {
                    return Err(Error::parse(no, "face ids start at 1"));
                }
                raws.push(Raw {
                    face: f - 1,
                    boundary: Vec::new(),
                    edges: Vec::new(),
                    bags: Vec::new(),
                    line: no,
                });
            }
            "society" | "ve" | "bag" => {
                let Some(raw) = raws.last_mut() else {
                    return Err(Error::parse(
                        no,
                        format!("'{key}' before any 'vortex' line"),
                    ));
                };
                match key {
                    "society" => {
                        raw.boundary = words.map(vertex).collect::<Result<_>>()?;
                    }
                    "ve" => {
                        let u = vertex(words.next().unwrap_or_default())?;
                        let v = vertex(words.next().unwrap_or_default())?;
                        raw.edges.push((u, v));
                    }
                    _ => {
                        let i: usize = parse_num(no, words.next())?;
                        if i != raw.bags.len() + 1 {
                            return Err(Error::parse(no, "bags must be numbered consecutively"));
                        }
                        raw.bags.push(words.map(vertex).collect::<Result<_>>()?);
                    }
                }
            }
            _ => return Err(Error::parse(no, format!("unexpected line '{t}'"))),
        }
    }
    let mut vortices = Vec::new();
    for raw in raws {
        let society = Society::new(&raw.edges, raw.boundary.clone())
            .map_err(|e| Error::parse(raw.line, e.to_string()))?;
        vortices.push(Vortex {
            face: raw.face,
            society,
            decomposition: LinearDecomposition {
                order: raw.boundary,
                bags: raw.bags,
            },
            cycle_decomposition: None,
        });
    }
    let r = SphereRendition {
        ground,
        vortices,
        auxiliary,
    };
    r.check(sphere).map_err(Error::input)?;
    Ok(r)
}
