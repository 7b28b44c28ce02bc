//! Simple undirected graphs with dense ids, edge cuts and block structure.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// A simple undirected graph. Vertices are `0..n`, edges `0..m` in
/// insertion order; each edge keeps the orientation it was created with so
/// that serialization reproduces the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    ends: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    index: HashMap<(VertexId, VertexId), EdgeId>,
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Graph on `n >= 1` isolated vertices.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("a graph needs at least one vertex"));
        }
        Ok(Graph {
            ends: Vec::new(),
            adj: vec![Vec::new(); n],
            index: HashMap::new(),
        })
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut g = Graph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::input(format!(
                "edge {u}-{v} uses an undeclared vertex"
            )));
        }
        if u == v {
            return Err(Error::input(format!("loop at vertex {u}")));
        }
        if self.index.contains_key(&key(u, v)) {
            return Err(Error::input(format!("duplicate edge {u}-{v}")));
        }
        let e = self.ends.len();
        self.ends.push((u, v));
        self.adj[u].push((v, e));
        self.adj[v].push((u, e));
        self.index.insert(key(u, v), e);
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.ends.len()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n()
    }

    pub fn edge_ids(&self) -> std::ops::Range<EdgeId> {
        0..self.m()
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.ends[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.ends
    }

    pub fn other(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// `(neighbour, edge)` pairs in insertion order.
    pub fn incident(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.index.get(&key(u, v)).copied()
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        e < self.m()
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &(w, _) in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// True when every component is a star (bw <= 1).
    pub fn is_star_forest(&self) -> bool {
        self.ends
            .iter()
            .all(|&(u, v)| self.degree(u) == 1 || self.degree(v) == 1)
    }

    /// Subgraph induced by `keep`, vertices renumbered in the order given.
    pub fn induced(&self, keep: &[VertexId]) -> Result<Subgraph> {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let mut g = Graph::new(keep.len())?;
        let mut edge_map = Vec::new();
        for (e, &(u, v)) in self.ends.iter().enumerate() {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                g.add_edge(local[u], local[v])?;
                edge_map.push(e);
            }
        }
        Ok(Subgraph {
            graph: g,
            vertex_map: keep.to_vec(),
            edge_map,
        })
    }

    /// Subgraph formed by the given edges and their endpoints; vertices are
    /// numbered by increasing original id, edges keep the given order.
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> Result<Subgraph> {
        let mut vs: Vec<VertexId> = edges
            .iter()
            .flat_map(|&e| [self.ends[e].0, self.ends[e].1])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        let mut local = HashMap::new();
        for (i, &v) in vs.iter().enumerate() {
            local.insert(v, i);
        }
        let mut g = Graph::new(vs.len().max(1))?;
        for &e in edges {
            let (u, v) = self.ends[e];
            g.add_edge(local[&u], local[&v])?;
        }
        Ok(Subgraph {
            graph: g,
            vertex_map: vs,
            edge_map: edges.to_vec(),
        })
    }
}

/// A graph together with maps from its local ids to the ids of a host graph.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
}

/// An edge set and the vertices it shares with its complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCut {
    pub side: BTreeSet<EdgeId>,
    pub boundary: BTreeSet<VertexId>,
}

/// Vertices incident both to an edge of `side` and to an edge outside it.
pub fn boundary(g: &Graph, side: &BTreeSet<EdgeId>) -> Result<BTreeSet<VertexId>> {
    if let Some(&e) = side.iter().find(|&&e| !g.has_edge(e)) {
        return Err(Error::input(format!("unknown edge id {e}")));
    }
    let mut inside = vec![false; g.m()];
    for &e in side {
        inside[e] = true;
    }
    Ok(boundary_of_mask(g, &inside))
}

pub fn edge_cut(g: &Graph, side: BTreeSet<EdgeId>) -> Result<EdgeCut> {
    let boundary = boundary(g, &side)?;
    Ok(EdgeCut { side, boundary })
}

pub(crate) fn boundary_of_mask(g: &Graph, inside: &[bool]) -> BTreeSet<VertexId> {
    g.vertices()
        .filter(|&v| {
            let inc = g.incident(v);
            inc.iter().any(|&(_, e)| inside[e]) && inc.iter().any(|&(_, e)| !inside[e])
        })
        .collect()
}

/// Block structure: blocks as sorted vertex lists plus their edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockForest {
    pub blocks: Vec<Vec<VertexId>>,
    pub block_edges: Vec<Vec<EdgeId>>,
    pub cut_vertices: BTreeSet<VertexId>,
    pub bridges: BTreeSet<EdgeId>,
}

/// Hopcroft–Tarjan low-point decomposition into blocks. Isolated vertices
/// form edgeless blocks.
pub fn blocks(g: &Graph) -> BlockForest {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut found: Vec<Vec<EdgeId>> = Vec::new();

    for root in g.vertices() {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        if g.degree(root) == 0 {
            found.push(Vec::new());
            continue;
        }
        // frames: (vertex, parent edge, next incidence index)
        let mut stack: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(root, None, 0)];
        while let Some(&(v, pe, idx)) = stack.last() {
            if idx < g.degree(v) {
                let (w, e) = g.incident(v)[idx];
                stack.last_mut().expect("frame").2 += 1;
                if Some(e) == pe {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(&(u, _, _)), Some(e)) = (stack.last(), pe) {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut comp = Vec::new();
                        while let Some(f) = edge_stack.pop() {
                            comp.push(f);
                            if f == e {
                                break;
                            }
                        }
                        found.push(comp);
                    }
                }
            }
        }
    }

    let isolated: Vec<VertexId> = g.vertices().filter(|&v| g.degree(v) == 0).collect();
    let mut iso_iter = isolated.into_iter();
    let mut pairs: Vec<(Vec<VertexId>, Vec<EdgeId>)> = found
        .into_iter()
        .map(|mut es| {
            if es.is_empty() {
                return (vec![iso_iter.next().expect("isolated vertex")], es);
            }
            es.sort_unstable();
            let mut vs: Vec<VertexId> = es
                .iter()
                .flat_map(|&e| [g.endpoints(e).0, g.endpoints(e).1])
                .collect();
            vs.sort_unstable();
            vs.dedup();
            (vs, es)
        })
        .collect();
    pairs.sort();

    let mut count = vec![0usize; n];
    for (vs, _) in &pairs {
        for &v in vs {
            count[v] += 1;
        }
    }
    let cut_vertices = g.vertices().filter(|&v| count[v] >= 2).collect();
    let bridges = pairs
        .iter()
        .filter(|(_, es)| es.len() == 1)
        .map(|(_, es)| es[0])
        .collect();
    let (blocks, block_edges) = pairs.into_iter().unzip();
    BlockForest {
        blocks,
        block_edges,
        cut_vertices,
        bridges,
    }
}

/// Parse the `p graph n m` / `e u v` edge-list format (1-indexed).
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (g, _) = parse_graph_lines(&mut lines, None)?;
    for (no, line) in lines {
        let t = line.trim();
        if !(t.is_empty() || t.starts_with('c')) {
            return Err(Error::parse(no, format!("unexpected line '{t}'")));
        }
    }
    Ok(g)
}

/// Parse a graph block from a line stream, stopping at the first line whose
/// keyword is not `p`, `e` or `c`. Returns the graph and that line, if any.
pub(crate) fn parse_graph_lines<'a, I>(
    lines: &mut I,
    first: Option<(usize, &'a str)>,
) -> Result<(Graph, Option<(usize, &'a str)>)>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let mut header: Option<(usize, usize)> = None;
    let mut g: Option<Graph> = None;
    let mut pending = first;
    let mut last_no = 0;
    while let Some((no, line)) = pending.take().or_else(|| lines.next()) {
        last_no = no;
        let t = line.trim();
        if t.is_empty() || t == "c" || t.starts_with("c ") {
            continue;
        }
        let mut words = t.split_whitespace();
        match words.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(Error::parse(no, "second header line"));
                }
                let (kind, n, m) = (words.next(), words.next(), words.next());
                if kind != Some("graph") || words.next().is_some() {
                    return Err(Error::parse(
                        no,
                        "malformed header, expected 'p graph <n> <m>'",
                    ));
                }
                let n: usize = parse_num(no, n)?;
                let m: usize = parse_num(no, m)?;
                g = Some(
                    Graph::new(n)
                        .map_err(|_| Error::parse(no, "graph must have at least one vertex"))?,
                );
                header = Some((n, m));
            }
            Some("e") => {
                let Some(graph) = g.as_mut() else {
                    return Err(Error::parse(no, "edge before header"));
                };
                let u: usize = parse_num(no, words.next())?;
                let v: usize = parse_num(no, words.next())?;
                if words.next().is_some() {
                    return Err(Error::parse(no, "malformed edge line"));
                }
                let n = graph.n();
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(Error::parse(no, format!("vertex out of range 1..={n}")));
                }
                if u == v {
                    return Err(Error::parse(no, format!("loop at vertex {u}")));
                }
                if graph.edge_between(u - 1, v - 1).is_some() {
                    return Err(Error::parse(no, format!("duplicate edge {u} {v}")));
                }
                graph
                    .add_edge(u - 1, v - 1)
                    .map_err(|e| Error::parse(no, e.to_string()))?;
            }
            Some(_) if header.is_some() => return Ok((finish(g, header, no)?, Some((no, line)))),
            Some(w) => return Err(Error::parse(no, format!("unknown keyword '{w}'"))),
            None => unreachable!(),
        }
    }
    if header.is_none() {
        return Err(Error::parse(last_no.max(1), "missing 'p graph' header"));
    }
    Ok((finish(g, header, last_no)?, None))
}

fn finish(g: Option<Graph>, header: Option<(usize, usize)>, no: usize) -> Result<Graph> {
    let g = g.expect("header seen");
    let (_, m) = header.expect("header seen");
    if g.m() != m {
        return Err(Error::parse(
            no,
            format!("header declares {m} edges, found {}", g.m()),
        ));
    }
    Ok(g)
}

pub(crate) fn parse_num<T: std::str::FromStr>(no: usize, w: Option<&str>) -> Result<T> {
    w.ok_or_else(|| Error::parse(no, "missing field"))?
        .parse()
        .map_err(|_| Error::parse(no, "malformed number"))
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = format!("p graph {} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}
