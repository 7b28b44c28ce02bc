use super::{EmbeddedGraph, RotationSystem};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Vertex/face incidence graph with parallel incidences collapsed.
#[derive(Clone, Debug)]
pub struct RadialGraph {
    pub embedding: EmbeddedGraph,
    /// radial vertex `i < n` is vertex `i`; radial vertex `n + f` is face `f`
    pub vertex_count: usize,
    pub face_count: usize,
}

impl RadialGraph {
    pub fn is_face(&self, x: VertexId) -> bool {
        x >= self.vertex_count
    }

    pub fn face_of(&self, x: VertexId) -> Option<usize> {
        self.is_face(x).then(|| x - self.vertex_count)
    }
}

/// Radial graph with the rotation induced by corners: around a vertex the
/// faces appear in corner order, around a face the vertices against walk order.
pub fn radial_graph(e: &EmbeddedGraph) -> Result<RadialGraph> {
    if !e.graph().is_connected() {
        return Err(Error::input("radial graph needs a connected embedding"));
    }
    let n = e.graph().n();
    let nf = e.faces().len();
    let map = e.map();
    let mut g = Graph::new(n + nf)?;
    let mut sign = Vec::new();
    // corner slot of every face position, used to order faces around a vertex
    let mut at_vertex: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut at_face: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for (f, face) in e.faces().iter().enumerate() {
        for s in &face.sides {
            let v = s.vertex;
            let k = map.rot[v].len();
            let slot = if s.side.orient > 0 {
                map.pos[s.side.dart]
            } else {
                (map.pos[s.side.dart] + 1) % k
            };
            let edge = match g.edge_between(v, n + f) {
                Some(x) => x,
                None => {
                    sign.push(s.side.orient);
                    g.add_edge(v, n + f)?
                }
            };
            at_vertex[v].push((slot, edge));
            if !at_face[f].contains(&edge) {
                at_face[f].push(edge);
            }
        }
    }
    let mut rotation = Vec::with_capacity(n + nf);
    for mut slots in at_vertex {
        slots.sort_unstable();
        let mut r = Vec::new();
        for (_, edge) in slots {
            if !r.contains(&edge) {
                r.push(edge);
            }
        }
        rotation.push(r);
    }
    rotation.extend(at_face.into_iter().map(|mut r| {
        r.reverse();
        r
    }));
    let embedding = EmbeddedGraph::new(RotationSystem::new(g, rotation, sign)?)?;
    Ok(RadialGraph {
        embedding,
        vertex_count: n,
        face_count: nf,
    })
}
