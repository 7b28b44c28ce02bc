//! Combinatorial embeddings: signed rotation systems, faces, Euler genus,
//! radial graphs, nooses and cutting along them.

pub(crate) mod map;
mod noose;
mod planar;
mod radial;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{
    parse_graph_lines, parse_num, serialize_graph, EdgeId, Graph, Subgraph, VertexId,
};

pub(crate) use map::Map;
pub use map::Side;
pub use noose::{
    cut_along_noose, is_contractible, shortest_noncontractible_noose, Noose, Representativity,
};
pub(crate) use noose::{noose_candidates_exhaustive, reembed_if_planar, shortest_noose_avoiding};
pub use planar::{planar_embed, PlanarEmbedding};
pub use radial::{radial_graph, RadialGraph};

/// Per-vertex cyclic orders of incident edges plus edge signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    graph: Graph,
    rotation: Vec<Vec<EdgeId>>,
    sign: Vec<i8>,
}

impl RotationSystem {
    pub fn new(graph: Graph, rotation: Vec<Vec<EdgeId>>, sign: Vec<i8>) -> Result<Self> {
        if rotation.len() != graph.n() {
            return Err(Error::input("rotation must list every vertex"));
        }
        if sign.len() != graph.m() || sign.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::input("one sign of +1 or -1 per edge required"));
        }
        for v in graph.vertices() {
            let mut listed = rotation[v].clone();
            listed.sort_unstable();
            let mut expected: Vec<EdgeId> = graph.incident(v).iter().map(|&(_, e)| e).collect();
            expected.sort_unstable();
            if listed != expected {
                return Err(Error::input(format!(
                    "rotation at vertex {} must list its incident edges once",
                    v + 1
                )));
            }
        }
        Ok(RotationSystem {
            graph,
            rotation,
            sign,
        })
    }

    /// Rotation taken from the graph's incidence order, all signs `+1`.
    pub fn from_incidence_order(graph: Graph) -> Self {
        let rotation = graph
            .vertices()
            .map(|v| graph.incident(v).iter().map(|&(_, e)| e).collect())
            .collect();
        let sign = vec![1; graph.m()];
        RotationSystem {
            graph,
            rotation,
            sign,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn rotation(&self, v: VertexId) -> &[EdgeId] {
        &self.rotation[v]
    }

    pub fn sign(&self, e: EdgeId) -> i8 {
        self.sign[e]
    }

    pub fn signs(&self) -> &[i8] {
        &self.sign
    }

    /// Dart of edge `e` leaving `v`.
    pub fn dart(&self, e: EdgeId, v: VertexId) -> usize {
        if self.graph.endpoints(e).0 == v {
            2 * e
        } else {
            2 * e + 1
        }
    }

    pub(crate) fn to_map(&self) -> Map {
        let rot = self
            .graph
            .vertices()
            .map(|v| self.rotation[v].iter().map(|&e| self.dart(e, v)).collect())
            .collect();
        Map::new(self.graph.n(), self.graph.edges(), self.sign.clone(), rot)
    }

    /// True if resigning vertices can make every sign `+1`.
    pub fn is_orientable(&self) -> bool {
        self.vertex_flips().1
    }

    /// Spanning-forest flips (breadth-first from the least vertex of each
    /// component) and whether they clear every negative sign.
    fn vertex_flips(&self) -> (Vec<i8>, bool) {
        let n = self.graph.n();
        let mut flip = vec![0i8; n];
        let mut ok = true;
        for s in self.graph.vertices() {
            if flip[s] != 0 {
                continue;
            }
            flip[s] = 1;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                let mut inc: Vec<(VertexId, EdgeId)> = self.graph.incident(v).to_vec();
                inc.sort_by_key(|&(_, e)| e);
                for (w, e) in inc {
                    let want = flip[v] * self.sign[e];
                    if flip[w] == 0 {
                        flip[w] = want;
                        queue.push_back(w);
                    } else if flip[w] != want {
                        ok = false;
                    }
                }
            }
        }
        (flip, ok)
    }

    /// Canonical form: resign vertices so spanning-forest edges are `+1`,
    /// then start every rotation at its least edge id.
    pub fn normalized(&self) -> Self {
        let (flip, _) = self.vertex_flips();
        let mut rotation = self.rotation.clone();
        let mut sign = self.sign.clone();
        for v in self.graph.vertices() {
            if flip[v] < 0 {
                rotation[v].reverse();
            }
        }
        for (e, &(u, v)) in self.graph.edges().iter().enumerate() {
            sign[e] *= flip[u] * flip[v];
        }
        for r in &mut rotation {
            if let Some(i) = r
                .iter()
                .enumerate()
                .min_by_key(|&(_, &e)| e)
                .map(|(i, _)| i)
            {
                r.rotate_left(i);
            }
        }
        RotationSystem {
            graph: self.graph.clone(),
            rotation,
            sign,
        }
    }

    /// Add edge `tail(from) -- tail(to)` through the corners just before the
    /// two face-walk states, with the sign that makes it split their face.
    pub(crate) fn with_chord(&self, from: Side, to: Side) -> Result<(RotationSystem, EdgeId)> {
        let ends = |s: Side| {
            let e = s.edge();
            let (u, v) = self.graph.endpoints(e);
            (if s.dart.is_multiple_of(2) { u } else { v }, e)
        };
        let (a, ea) = ends(from);
        let (b, eb) = ends(to);
        let mut graph = self.graph.clone();
        let new = graph.add_edge(a, b)?;
        let mut rotation = self.rotation.clone();
        for (v, e, orient) in [(a, ea, from.orient), (b, eb, to.orient)] {
            let i = rotation[v]
                .iter()
                .position(|&x| x == e)
                .expect("state edge at its vertex");
            let at = if orient > 0 { i } else { i + 1 };
            rotation[v].insert(at, new);
        }
        let mut sign = self.sign.clone();
        sign.push(from.orient * to.orient);
        Ok((
            RotationSystem {
                graph,
                rotation,
                sign,
            },
            new,
        ))
    }

    /// Induced rotation on a subgraph; darts of dropped edges are removed.
    pub fn restrict(&self, sub: &Subgraph) -> RotationSystem {
        let mut local_edge = std::collections::HashMap::new();
        for (i, &e) in sub.edge_map.iter().enumerate() {
            local_edge.insert(e, i);
        }
        let rotation = sub
            .vertex_map
            .iter()
            .map(|&v| {
                self.rotation[v]
                    .iter()
                    .filter_map(|e| local_edge.get(e).copied())
                    .collect()
            })
            .collect();
        let sign = sub.edge_map.iter().map(|&e| self.sign[e]).collect();
        RotationSystem {
            graph: sub.graph.clone(),
            rotation,
            sign,
        }
    }
}

/// One step of a face walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceSide {
    pub vertex: VertexId,
    pub edge: EdgeId,
    pub side: Side,
}

/// A closed face walk; `sides[i].vertex` is the corner vertex at position `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub sides: Vec<FaceSide>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.sides.iter().map(|s| s.vertex)
    }
}

pub fn trace_faces(r: &RotationSystem) -> Vec<Face> {
    let map = r.to_map();
    map.faces()
        .into_iter()
        .map(|walk| Face {
            sides: walk
                .into_iter()
                .map(|s| FaceSide {
                    vertex: map.tail[s.dart],
                    edge: s.edge(),
                    side: s,
                })
                .collect(),
        })
        .collect()
}

/// A rotation system with its faces and Euler genus.
#[derive(Clone, Debug)]
pub struct EmbeddedGraph {
    rotation: RotationSystem,
    faces: Vec<Face>,
    genus: usize,
    /// state index -> (face, position)
    locate: Vec<(usize, usize)>,
}

impl EmbeddedGraph {
    pub fn new(rotation: RotationSystem) -> Result<Self> {
        let faces = trace_faces(&rotation);
        let map = rotation.to_map();
        let walks: Vec<Vec<Side>> = faces
            .iter()
            .map(|f| f.sides.iter().map(|s| s.side).collect())
            .collect();
        let genus = map
            .euler_genus(&walks)
            .ok_or_else(|| Error::internal("negative Euler genus: malformed rotation"))?;
        let mut locate = vec![(usize::MAX, usize::MAX); 4 * rotation.graph.m()];
        for (fi, f) in faces.iter().enumerate() {
            for (p, s) in f.sides.iter().enumerate() {
                locate[map::state_index(s.side)] = (fi, p);
            }
        }
        Ok(EmbeddedGraph {
            rotation,
            faces,
            genus,
            locate,
        })
    }

    /// Planar-style embedding from the graph's incidence order (genus is
    /// whatever that order yields).
    pub fn from_graph_order(g: Graph) -> Self {
        EmbeddedGraph::new(RotationSystem::from_incidence_order(g))
            .expect("incidence rotation is well formed")
    }

    pub fn rotation(&self) -> &RotationSystem {
        &self.rotation
    }

    pub fn graph(&self) -> &Graph {
        self.rotation.graph()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub(crate) fn map(&self) -> Map {
        self.rotation.to_map()
    }

    /// Face and position of a traced state, if the state lies on a stored walk.
    pub fn locate(&self, s: Side) -> Option<(usize, usize)> {
        let r = self.locate[map::state_index(s)];
        (r.0 != usize::MAX).then_some(r)
    }

    /// Per-component genus values (components ordered by least vertex).
    pub fn component_genus(&self) -> Vec<usize> {
        let map = self.map();
        let walks: Vec<Vec<Side>> = self
            .faces
            .iter()
            .map(|f| f.sides.iter().map(|s| s.side).collect())
            .collect();
        map.component_genus(&walks)
            .into_iter()
            .map(|g| g.max(0) as usize)
            .collect()
    }

    /// Faces incident to each vertex, as sorted unique lists.
    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.graph().n()];
        for (fi, f) in self.faces.iter().enumerate() {
            for v in f.vertices() {
                out[v].push(fi);
            }
        }
        for l in &mut out {
            l.sort_unstable();
            l.dedup();
        }
        out
    }

    /// Induced embedding on a vertex subset.
    pub fn induced(&self, keep: &[VertexId]) -> Result<(EmbeddedGraph, Subgraph)> {
        let sub = self.graph().induced(keep)?;
        let rot = self.rotation.restrict(&sub);
        Ok((EmbeddedGraph::new(rot)?, sub))
    }

    /// Induced embedding on an edge subset.
    pub fn edge_induced(&self, edges: &[EdgeId]) -> Result<(EmbeddedGraph, Subgraph)> {
        let sub = self.graph().edge_subgraph(edges)?;
        let rot = self.rotation.restrict(&sub);
        Ok((EmbeddedGraph::new(rot)?, sub))
    }
}

pub fn embedding_genus(e: &EmbeddedGraph) -> usize {
    e.genus()
}

/// Parse a graph block followed by `r v e1 .. ek` and `s e -1` lines.
pub fn parse_embedding(text: &str) -> Result<EmbeddedGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (g, next) = parse_graph_lines(&mut lines, None)?;
    let (e, rest) = parse_rotation_lines(g, &mut lines, next)?;
    if let Some((no, l)) = rest {
        return Err(Error::parse(no, format!("unexpected line '{}'", l.trim())));
    }
    Ok(e)
}

pub(crate) fn parse_rotation_lines<'a, I>(
    g: Graph,
    lines: &mut I,
    first: Option<(usize, &'a str)>,
) -> Result<(EmbeddedGraph, Option<(usize, &'a str)>)>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let mut rotation: Vec<Option<Vec<EdgeId>>> = vec![None; g.n()];
    let mut sign = vec![1i8; g.m()];
    let mut pending = first;
    let mut last_no = 0;
    let mut stop = None;
    while let Some((no, line)) = pending.take().or_else(|| lines.next()) {
        last_no = no;
        let t = line.trim();
        if t.is_empty() || t == "c" || t.starts_with("c ") {
            continue;
        }
        let mut words = t.split_whitespace();
        match words.next() {
            Some("r") => {
                let v: usize = parse_num(no, words.next())?;
                if v == 0 || v > g.n() {
                    return Err(Error::parse(no, "rotation vertex out of range"));
                }
                if rotation[v - 1].is_some() {
                    return Err(Error::parse(no, "second rotation line for a vertex"));
                }
                let mut list = Vec::new();
                for w in words {
                    let e: usize = parse_num(no, Some(w))?;
                    if e == 0 || e > g.m() {
                        return Err(Error::parse(no, "rotation edge out of range"));
                    }
                    list.push(e - 1);
                }
                rotation[v - 1] = Some(list);
            }
            Some("s") => {
                let e: usize = parse_num(no, words.next())?;
                let s: i64 = parse_num(no, words.next())?;
                if e == 0 || e > g.m() || s != -1 || words.next().is_some() {
                    return Err(Error::parse(
                        no,
                        "malformed sign line, expected 's <edge> -1'",
                    ));
                }
                sign[e - 1] = -1;
            }
            Some(_) => {
                stop = Some((no, line));
                break;
            }
            None => unreachable!(),
        }
    }
    let mut full = Vec::with_capacity(g.n());
    for v in g.vertices() {
        match rotation[v].take() {
            Some(r) => full.push(r),
            None if g.degree(v) <= 2 => full.push(g.incident(v).iter().map(|&(_, e)| e).collect()),
            None => {
                return Err(Error::parse(
                    last_no.max(1),
                    format!("missing rotation for vertex {}", v + 1),
                ))
            }
        }
    }
    let rot = RotationSystem::new(g, full, sign)
        .map_err(|e| Error::parse(last_no.max(1), e.to_string()))?;
    Ok((EmbeddedGraph::new(rot)?, stop))
}

pub fn serialize_embedding(e: &EmbeddedGraph) -> String {
    let mut out = serialize_graph(e.graph());
    write_rotation_lines(e.rotation(), &mut out);
    out
}

pub(crate) fn write_rotation_lines(r: &RotationSystem, out: &mut String) {
    for v in r.graph().vertices() {
        if r.rotation(v).is_empty() {
            continue;
        }
        let _ = write!(out, "r {}", v + 1);
        for &e in r.rotation(v) {
            let _ = write!(out, " {}", e + 1);
        }
        out.push('\n');
    }
    for e in r.graph().edge_ids() {
        if r.sign(e) < 0 {
            let _ = writeln!(out, "s {} -1", e + 1);
        }
    }
}
