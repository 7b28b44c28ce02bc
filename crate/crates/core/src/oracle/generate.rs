use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::graph::{Graph, VertexId};
use crate::gridminer::{serialize_grid_model, GridModel};
use crate::pipeline::{serialize_near_embedding, Adhesion, AdhesionKind, Bag, NearEmbeddingInput};
use crate::surface::{planar_embed, serialize_embedding, EmbeddedGraph, PlanarEmbedding};
use crate::vortex::{serialize_rendition, LinearDecomposition, Society, SphereRendition, Vortex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    PlanarRandom,
    ToroidalGrid,
    KleinGrid,
    PlantedVortex,
    PlantedGrid,
    NearEmbedding,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::PlanarRandom,
        Kind::ToroidalGrid,
        Kind::KleinGrid,
        Kind::PlantedVortex,
        Kind::PlantedGrid,
        Kind::NearEmbedding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::PlanarRandom => "planar-random",
            Kind::ToroidalGrid => "toroidal-grid",
            Kind::KleinGrid => "klein-grid",
            Kind::PlantedVortex => "planted-vortex",
            Kind::PlantedGrid => "planted-grid",
            Kind::NearEmbedding => "near-embedding",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::input(format!("unknown instance kind '{s}'")))
    }
}

/// Sphere rendition with planted vortices of recorded width and breadth.
#[derive(Clone, Debug)]
pub struct VortexInstance {
    pub rendition: SphereRendition,
    /// largest bag over all vortex decompositions
    pub width: usize,
    pub breadth: usize,
}

/// Planar host containing a planted `r x r` grid minor.
#[derive(Clone, Debug)]
pub struct GridInstance {
    pub host: EmbeddedGraph,
    pub r: usize,
    pub model: GridModel,
}

#[derive(Clone, Debug)]
pub struct NearEmbeddingInstance {
    pub input: NearEmbeddingInput,
    /// verified kind of every adhesion, by child bag
    pub kinds: Vec<(usize, AdhesionKind)>,
}

#[derive(Clone, Debug)]
pub enum Instance {
    Embedded(EmbeddedGraph),
    Vortex(VortexInstance),
    Grid(GridInstance),
    NearEmbedding(NearEmbeddingInstance),
}

impl Instance {
    pub fn serialize(&self) -> String {
        match self {
            Instance::Embedded(e) => serialize_embedding(e),
            Instance::Vortex(v) => {
                let mut out = format!("c width {} breadth {}\n", v.width, v.breadth);
                out.push_str(&serialize_rendition(&v.rendition));
                out
            }
            Instance::Grid(g) => {
                let mut out = serialize_embedding(&g.host);
                out.push_str(&serialize_grid_model(&g.model));
                out
            }
            Instance::NearEmbedding(n) => serialize_near_embedding(&n.input),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic instance of `kind` with sizes drawn from `seed`.
pub fn generate(kind: Kind, seed: u64) -> Result<Instance> {
    let mut r = rng(seed);
    Ok(match kind {
        Kind::PlanarRandom => {
            let n = r.gen_range(4..=9);
            let m = r.gen_range(n - 1..=(3 * n - 6).min(n + 6));
            Instance::Embedded(random_planar(n, m, seed))
        }
        Kind::ToroidalGrid => Instance::Embedded(fixtures::torus_grid(r.gen_range(3..=6))),
        Kind::KleinGrid => Instance::Embedded(fixtures::klein_grid(r.gen_range(3..=6))),
        Kind::PlantedVortex => Instance::Vortex(planted_vortex(seed)),
        Kind::PlantedGrid => Instance::Grid(planted_grid(r.gen_range(2..=6), seed)),
        Kind::NearEmbedding => Instance::NearEmbedding(near_embedding(seed)?),
    })
}

fn embed_planar(g: Graph) -> EmbeddedGraph {
    match planar_embed(&g) {
        PlanarEmbedding::Planar(rot) => EmbeddedGraph::new(rot).expect("planar rotation"),
        PlanarEmbedding::NonPlanar => unreachable!("generator keeps graphs planar"),
    }
}

fn try_add_planar(g: &mut Graph, u: VertexId, v: VertexId) -> bool {
    if u == v || g.edge_between(u, v).is_some() {
        return false;
    }
    let mut h = g.clone();
    h.add_edge(u, v).expect("vertices exist");
    if planar_embed(&h).is_planar() {
        *g = h;
        true
    } else {
        false
    }
}

/// Connected planar graph on `n` vertices: a random tree, then random
/// edges kept while the graph stays planar, up to `m` edges.
pub fn random_planar(n: usize, m: usize, seed: u64) -> EmbeddedGraph {
    let mut r = rng(seed ^ 0x5eed_0001);
    let mut g = Graph::new(n.max(1)).expect("positive order");
    let mut label: Vec<VertexId> = (0..n).collect();
    label.shuffle(&mut r);
    for i in 1..n {
        let j = r.gen_range(0..i);
        g.add_edge(label[i], label[j]).expect("tree edge");
    }
    let mut attempts = 0;
    while g.m() < m && attempts < 40 * m.max(1) {
        attempts += 1;
        let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
        try_add_planar(&mut g, u, v);
    }
    embed_planar(g)
}

/// Grid ground with vortices in square faces and, sometimes, the outer
/// face. Vortex edges have an interior end, so the ground is the graph
/// with vortex interiors removed.
pub fn planted_vortex(seed: u64) -> VortexInstance {
    let mut r = rng(seed ^ 0x5eed_0002);
    let (a, c) = (r.gen_range(3..=5), r.gen_range(3..=5));
    let ground = fixtures::grid(a, c);
    let faces: Vec<Vec<VertexId>> = ground
        .faces()
        .iter()
        .map(|f| f.vertices().collect())
        .collect();
    let outer = (0..faces.len())
        .max_by_key(|&f| faces[f].len())
        .expect("faces");
    let mut squares: Vec<usize> = (0..faces.len()).filter(|&f| f != outer).collect();
    squares.shuffle(&mut r);
    let mut chosen: Vec<usize> = Vec::new();
    if r.gen_bool(0.5) {
        chosen.push(outer);
    }
    let extra = r.gen_range(1..=2);
    chosen.extend(squares.iter().take(extra));
    let w_cap = r.gen_range(2..=4);
    let mut next = ground.graph().n();
    let mut vortices = Vec::new();
    for &f in &chosen {
        let walk = &faces[f];
        let boundary: Vec<VertexId> = if walk.len() > 4 {
            let want = r.gen_range(4..=walk.len().min(8));
            let mut pos: Vec<usize> = (0..walk.len()).collect();
            pos.shuffle(&mut r);
            let mut pos: Vec<usize> = pos.into_iter().take(want).collect();
            pos.sort_unstable();
            pos.into_iter().map(|p| walk[p]).collect()
        } else {
            walk.clone()
        };
        let (society, ld) = random_society(&mut r, &boundary, &mut next, w_cap);
        vortices.push(Vortex {
            face: f,
            society,
            decomposition: ld,
            cycle_decomposition: None,
        });
    }
    let rendition = SphereRendition::new(ground, vortices);
    debug_assert!(rendition.validate().is_ok());
    VortexInstance {
        width: rendition.max_width(),
        breadth: rendition.breadth(),
        rendition,
    }
}

/// Interior vertices with interval spans over the boundary positions,
/// bags of size at most `cap`, random edges (each with an interior end)
/// inside bags.
fn random_society(
    r: &mut ChaCha8Rng,
    boundary: &[VertexId],
    next: &mut VertexId,
    cap: usize,
) -> (Society, LinearDecomposition) {
    let l = boundary.len();
    let mut bags: Vec<BTreeSet<VertexId>> = boundary.iter().map(|&v| BTreeSet::from([v])).collect();
    let tries = r.gen_range(1..=2 * l);
    let mut interior = Vec::new();
    for _ in 0..tries {
        let s = r.gen_range(0..l);
        let len = r.gen_range(1..=3.min(l - s));
        if (s..s + len).any(|i| bags[i].len() >= cap) {
            continue;
        }
        let x = *next;
        *next += 1;
        interior.push((x, s));
        for bag in &mut bags[s..s + len] {
            bag.insert(x);
        }
    }
    if interior.is_empty() {
        let x = *next;
        *next += 1;
        interior.push((x, 0));
        bags[0].insert(x);
    }
    let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let inner: BTreeSet<VertexId> = interior.iter().map(|&(x, _)| x).collect();
    for bag in &bags {
        let xs: Vec<VertexId> = bag.iter().copied().collect();
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let (u, v) = (xs[i], xs[j]);
                if (inner.contains(&u) || inner.contains(&v)) && r.gen_bool(0.6) {
                    edges.insert((u, v));
                }
            }
        }
    }
    for &(x, s) in &interior {
        if !edges.iter().any(|&(u, v)| u == x || v == x) {
            edges.insert((boundary[s].min(x), boundary[s].max(x)));
        }
    }
    let edges: Vec<(VertexId, VertexId)> = edges.into_iter().collect();
    let society = Society::new(&edges, boundary.to_vec()).expect("society");
    (
        society,
        LinearDecomposition {
            order: boundary.to_vec(),
            bags,
        },
    )
}

/// `r x r` grid with every edge subdivided 0 to 2 times, padded with
/// pendant vertices and planarity-preserving edges, vertices relabelled
/// at random. Subdivision vertices join the branch set of the left or
/// upper end.
pub fn planted_grid(r: usize, seed: u64) -> GridInstance {
    let mut rg = rng(seed ^ 0x5eed_0003);
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut sets: Vec<BTreeSet<VertexId>> = (0..r * r).map(|v| BTreeSet::from([v])).collect();
    let mut n = r * r;
    for i in 0..r {
        for j in 0..r {
            let a = i * r + j;
            let mut ends = Vec::new();
            if j + 1 < r {
                ends.push(a + 1);
            }
            if i + 1 < r {
                ends.push(a + r);
            }
            for b in ends {
                let mut prev = a;
                for _ in 0..rg.gen_range(0..=2) {
                    edges.push((prev, n));
                    sets[a].insert(n);
                    prev = n;
                    n += 1;
                }
                edges.push((prev, b));
            }
        }
    }
    let mut g = Graph::from_edges(n, &edges).expect("subdivided grid");
    for _ in 0..rg.gen_range(0..=r * r) {
        if rg.gen_bool(0.5) {
            let v = g.add_vertex();
            let u = rg.gen_range(0..v);
            g.add_edge(u, v).expect("pendant edge");
        } else {
            let (u, v) = (rg.gen_range(0..g.n()), rg.gen_range(0..g.n()));
            try_add_planar(&mut g, u, v);
        }
    }
    let mut label: Vec<VertexId> = (0..g.n()).collect();
    label.shuffle(&mut rg);
    let relabelled: Vec<(VertexId, VertexId)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (label[u], label[v]))
        .collect();
    let host = embed_planar(Graph::from_edges(g.n(), &relabelled).expect("relabelled host"));
    let model = GridModel {
        r,
        branch_sets: sets
            .iter()
            .map(|s| s.iter().map(|&v| label[v]).collect())
            .collect(),
    };
    GridInstance { host, r, model }
}

/// Builder for near-embedding instances with global vertex ids.
struct Assembly {
    graph: Graph,
    bags: Vec<Bag>,
    tree: Vec<(usize, usize)>,
    kinds: Vec<(usize, AdhesionKind)>,
}

impl Assembly {
    fn fresh(&mut self, k: usize) -> Vec<VertexId> {
        (0..k).map(|_| self.graph.add_vertex()).collect()
    }

    fn edge(&mut self, u: VertexId, v: VertexId) {
        if u != v && self.graph.edge_between(u, v).is_none() {
            self.graph.add_edge(u, v).expect("known vertices");
        }
    }

    /// A bag whose apex set is `s` and whose rendition is a small planar
    /// graph on new vertices, each of `s` joined to one or two of them.
    fn planar_child(&mut self, r: &mut ChaCha8Rng, s: &BTreeSet<VertexId>) -> usize {
        let ground = match r.gen_range(0..3) {
            0 => fixtures::cycle(r.gen_range(3..=5)),
            1 => fixtures::grid(2, r.gen_range(2..=3)),
            _ => fixtures::wheel(r.gen_range(3..=5)),
        };
        let map = self.fresh(ground.graph().n());
        for &(u, v) in ground.graph().edges() {
            self.edge(map[u], map[v]);
        }
        for &x in s {
            for _ in 0..r.gen_range(1..=2) {
                let y = *map.choose(r).expect("non-empty");
                self.edge(x, y);
            }
        }
        self.bags.push(Bag {
            vertices: s.iter().copied().chain(map.iter().copied()).collect(),
            apex: s.clone(),
            rendition: SphereRendition::new(ground, Vec::new()),
            map,
            adhesions: Vec::new(),
        });
        self.bags.len() - 1
    }

    fn attach(&mut self, r: &mut ChaCha8Rng, parent: usize, child: usize, kind: AdhesionKind) {
        let vertices = self.bags[parent]
            .vertices
            .intersection(&self.bags[child].vertices)
            .copied()
            .collect();
        self.tree.push((parent, child));
        self.kinds.push((child, kind));
        self.bags[parent].adhesions.push(Adhesion {
            child,
            vertices,
            hint: r.gen_bool(0.5).then_some(kind),
        });
    }
}

/// Root bag on the sphere, torus or Klein bottle with an optional saturated
/// vortex and apex vertices; children hang off apex sets, vortex bags and
/// ground edges, and some children carry a grandchild on a ground edge.
pub fn near_embedding(seed: u64) -> Result<NearEmbeddingInstance> {
    let mut r = rng(seed ^ 0x5eed_0004);
    let size = r.gen_range(3..=4);
    let ground = match r.gen_range(0..3) {
        0 => fixtures::grid(size, size + 1),
        1 => fixtures::torus_grid(size),
        _ => fixtures::klein_grid(size),
    };
    let mut asm = Assembly {
        graph: Graph::new(1)?,
        bags: Vec::new(),
        tree: Vec::new(),
        kinds: Vec::new(),
    };
    asm.graph = Graph::new(ground.graph().n())?;
    for &(u, v) in ground.graph().edges() {
        asm.edge(u, v);
    }
    let mut vortices = Vec::new();
    if r.gen_bool(0.7) {
        let squares: Vec<usize> = (0..ground.faces().len())
            .filter(|&f| {
                let vs: BTreeSet<VertexId> = ground.faces()[f].vertices().collect();
                vs.len() == 4 && ground.faces()[f].len() == 4
            })
            .collect();
        let &f = squares.choose(&mut r).expect("grids have square faces");
        let boundary: Vec<VertexId> = ground.faces()[f].vertices().collect();
        let mut next = ground.graph().n();
        let (society, ld) = saturated_society(&mut r, &boundary, &mut next);
        vortices.push(Vortex {
            face: f,
            society,
            decomposition: ld,
            cycle_decomposition: None,
        });
    }
    let rendition = SphereRendition::new(ground, vortices);
    let count = rendition.vertex_count();
    while asm.graph.n() < count {
        asm.graph.add_vertex();
    }
    for vx in &rendition.vortices {
        for (u, v) in vx.society.labelled_edges() {
            asm.edge(u, v);
        }
    }
    let ground_n = rendition.ground.graph().n();
    let apex: BTreeSet<VertexId> = asm.fresh(r.gen_range(0..=2)).into_iter().collect();
    for &a in &apex {
        for _ in 0..r.gen_range(2..=4) {
            let y = r.gen_range(0..ground_n);
            asm.edge(a, y);
        }
    }
    asm.bags.push(Bag {
        vertices: (0..count).chain(apex.iter().copied()).collect(),
        apex: apex.clone(),
        map: (0..count).collect(),
        rendition: rendition.clone(),
        adhesions: Vec::new(),
    });

    for _ in 0..r.gen_range(1..=3) {
        let mut options = vec![AdhesionKind::SmallCell];
        if !apex.is_empty() {
            options.push(AdhesionKind::Apex);
        }
        if !rendition.vortices.is_empty() {
            options.push(AdhesionKind::VortexBag);
        }
        let kind = *options.choose(&mut r).expect("cell is always possible");
        let mut extra: BTreeSet<VertexId> =
            apex.iter().copied().filter(|_| r.gen_bool(0.5)).collect();
        let s: BTreeSet<VertexId> = match kind {
            AdhesionKind::Apex => {
                if extra.is_empty() {
                    extra.insert(*apex.iter().next().expect("apex"));
                }
                extra
            }
            AdhesionKind::VortexBag => {
                let vx = &rendition.vortices[0];
                let bag = vx.decomposition.bags.choose(&mut r).expect("bags");
                bag.iter().copied().chain(extra).collect()
            }
            AdhesionKind::SmallCell => {
                let g0 = rendition.ground.graph();
                let e = r.gen_range(0..g0.m());
                let (u, v) = g0.endpoints(e);
                let ends: Vec<VertexId> = if r.gen_bool(0.7) { vec![u, v] } else { vec![u] };
                ends.into_iter().chain(extra).collect()
            }
        };
        let child = asm.planar_child(&mut r, &s);
        asm.attach(&mut r, 0, child, kind);
        if r.gen_bool(0.4) {
            let cg = asm.bags[child].rendition.ground.graph().clone();
            let e = r.gen_range(0..cg.m());
            let (u, v) = cg.endpoints(e);
            let map = &asm.bags[child].map;
            let s2: BTreeSet<VertexId> = [map[u], map[v]].into_iter().collect();
            let grand = asm.planar_child(&mut r, &s2);
            asm.attach(&mut r, child, grand, AdhesionKind::SmallCell);
        }
    }
    let input = NearEmbeddingInput {
        graph: asm.graph,
        root: 0,
        tree: asm.tree,
        bags: asm.bags,
    };
    input
        .validate()
        .map_err(|d| Error::internal(format!("generated near-embedding: {d}")))?;
    Ok(NearEmbeddingInstance {
        input,
        kinds: asm.kinds,
    })
}

/// Bags `{v_i} + interior`, interiors spanning intervals, every bag a
/// clique.
fn saturated_society(
    r: &mut ChaCha8Rng,
    boundary: &[VertexId],
    next: &mut VertexId,
) -> (Society, LinearDecomposition) {
    let l = boundary.len();
    let mut bags: Vec<BTreeSet<VertexId>> = boundary.iter().map(|&v| BTreeSet::from([v])).collect();
    for _ in 0..r.gen_range(1..=2) {
        let s = r.gen_range(0..l);
        let len = r.gen_range(1..=l - s);
        let x = *next;
        *next += 1;
        for bag in &mut bags[s..s + len] {
            bag.insert(x);
        }
    }
    let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for bag in &bags {
        let xs: Vec<VertexId> = bag.iter().copied().collect();
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                edges.insert((xs[i], xs[j]));
            }
        }
    }
    let edges: Vec<(VertexId, VertexId)> = edges.into_iter().collect();
    (
        Society::new(&edges, boundary.to_vec()).expect("society"),
        LinearDecomposition {
            order: boundary.to_vec(),
            bags,
        },
    )
}

/// Text of the instance for `gen`, with a header naming kind and seed.
pub fn describe(kind: Kind, seed: u64) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "c {} seed {}", kind.name(), seed);
    out.push_str(&generate(kind, seed)?.serialize());
    Ok(out)
}
