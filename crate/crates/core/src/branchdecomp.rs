//! Branch-decompositions: width, validation, composition over blocks and
//! apex sets, conversion to tree-decompositions, and the text format.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::Diagnostic;

/// Unrooted tree whose leaves carry the edges of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BranchDecomposition {
    adj: Vec<Vec<usize>>,
    leaf: Vec<Option<EdgeId>>,
}

impl BranchDecomposition {
    /// Decomposition of an edgeless graph.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(e: EdgeId) -> Self {
        BranchDecomposition {
            adj: vec![Vec::new()],
            leaf: vec![Some(e)],
        }
    }

    /// Left-leaning caterpillar with leaves in the given order.
    pub fn caterpillar(edges: &[EdgeId]) -> Self {
        let mut bd = Self::empty();
        match edges.len() {
            0 => return bd,
            1 => return Self::single(edges[0]),
            2 => {
                let a = bd.add_node(Some(edges[0]));
                let b = bd.add_node(Some(edges[1]));
                bd.link(a, b);
                return bd;
            }
            _ => {}
        }
        let k = edges.len();
        let first = bd.add_node(Some(edges[0]));
        let mut spine = bd.add_node(None);
        bd.link(first, spine);
        for (i, &e) in edges.iter().enumerate().take(k - 1).skip(1) {
            let l = bd.add_node(Some(e));
            bd.link(spine, l);
            if i + 2 < k {
                let next = bd.add_node(None);
                bd.link(spine, next);
                spine = next;
            }
        }
        let last = bd.add_node(Some(edges[k - 1]));
        bd.link(spine, last);
        bd
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn leaf_edge(&self, u: usize) -> Option<EdgeId> {
        self.leaf[u]
    }

    /// `(node, edge)` for every leaf, by node id.
    pub fn leaves(&self) -> Vec<(usize, EdgeId)> {
        self.leaf
            .iter()
            .enumerate()
            .filter_map(|(u, e)| e.map(|e| (u, e)))
            .collect()
    }

    pub fn edges_covered(&self) -> Vec<EdgeId> {
        let mut es: Vec<EdgeId> = self.leaf.iter().flatten().copied().collect();
        es.sort_unstable();
        es
    }

    pub fn leaf_of(&self, e: EdgeId) -> Option<usize> {
        self.leaf.iter().position(|&x| x == Some(e))
    }

    /// Tree edges as `(a, b)` with `a < b`, sorted.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect();
        out.sort_unstable();
        out
    }

    pub(crate) fn add_node(&mut self, leaf: Option<EdgeId>) -> usize {
        self.adj.push(Vec::new());
        self.leaf.push(leaf);
        self.adj.len() - 1
    }

    pub(crate) fn link(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub(crate) fn unlink(&mut self, a: usize, b: usize) {
        self.adj[a].retain(|&x| x != b);
        self.adj[b].retain(|&x| x != a);
    }

    /// Insert a new node in the middle of tree edge `ab`.
    pub(crate) fn subdivide(&mut self, a: usize, b: usize) -> usize {
        self.unlink(a, b);
        let s = self.add_node(None);
        self.link(a, s);
        self.link(s, b);
        s
    }

    /// Copy `other` into this tree; returns the node offset.
    pub(crate) fn absorb(&mut self, other: &BranchDecomposition) -> usize {
        let off = self.adj.len();
        for (u, ns) in other.adj.iter().enumerate() {
            self.adj.push(ns.iter().map(|&x| x + off).collect());
            self.leaf.push(other.leaf[u]);
        }
        off
    }

    /// Rename leaf labels through `map` (local edge id -> host edge id).
    pub fn relabel(&self, map: &[EdgeId]) -> Self {
        BranchDecomposition {
            adj: self.adj.clone(),
            leaf: self.leaf.iter().map(|l| l.map(|e| map[e])).collect(),
        }
    }

    /// Delete leaves whose edge satisfies `drop`, then suppress internal
    /// nodes left with degree two and prune internal nodes left as leaves.
    pub fn remove_leaves(&mut self, drop: impl Fn(EdgeId) -> bool) {
        let mut alive = vec![true; self.adj.len()];
        for u in 0..self.adj.len() {
            if self.leaf[u].is_some_and(&drop) {
                alive[u] = false;
                for b in self.adj[u].clone() {
                    self.unlink(u, b);
                }
            }
        }
        loop {
            let mut changed = false;
            for u in 0..self.adj.len() {
                if !alive[u] || self.leaf[u].is_some() {
                    continue;
                }
                match self.adj[u].len() {
                    0 | 1 => {
                        for b in self.adj[u].clone() {
                            self.unlink(u, b);
                        }
                        alive[u] = false;
                        changed = true;
                    }
                    2 => {
                        let (a, b) = (self.adj[u][0], self.adj[u][1]);
                        self.unlink(u, a);
                        self.unlink(u, b);
                        self.link(a, b);
                        alive[u] = false;
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        self.compact(&alive);
    }

    fn compact(&mut self, alive: &[bool]) {
        let mut id = vec![usize::MAX; self.adj.len()];
        let mut next = 0;
        for u in 0..self.adj.len() {
            if alive[u] {
                id[u] = next;
                next += 1;
            }
        }
        let mut adj = vec![Vec::new(); next];
        let mut leaf = vec![None; next];
        for u in 0..self.adj.len() {
            if alive[u] {
                adj[id[u]] = self.adj[u].iter().map(|&x| id[x]).collect();
                leaf[id[u]] = self.leaf[u];
            }
        }
        self.adj = adj;
        self.leaf = leaf;
    }

    /// For each tree edge `(a, b)` of `tree_edges()`, the leaf edges on the
    /// `a` side.
    pub fn edge_sides(&self) -> Vec<Vec<EdgeId>> {
        let n = self.adj.len();
        if n == 0 {
            return Vec::new();
        }
        // leaf order by depth-first search from node 0; subtrees are intervals
        let mut parent = vec![usize::MAX; n];
        let mut lo = vec![0usize; n];
        let mut hi = vec![0usize; n];
        let mut order: Vec<EdgeId> = Vec::new();
        let mut stack = vec![(0usize, false)];
        let mut seen = vec![false; n];
        while let Some((u, done)) = stack.pop() {
            if done {
                hi[u] = order.len();
                continue;
            }
            seen[u] = true;
            lo[u] = order.len();
            if let Some(e) = self.leaf[u] {
                order.push(e);
            }
            stack.push((u, true));
            for &w in self.adj[u].iter().rev() {
                if !seen[w] {
                    parent[w] = u;
                    stack.push((w, false));
                }
            }
        }
        self.tree_edges()
            .into_iter()
            .map(|(a, b)| {
                let (child, child_is_a) = if parent[b] == a {
                    (b, false)
                } else {
                    (a, true)
                };
                let inside = &order[lo[child]..hi[child]];
                if child_is_a {
                    inside.to_vec()
                } else {
                    let mut rest = order[..lo[child]].to_vec();
                    rest.extend_from_slice(&order[hi[child]..]);
                    rest
                }
            })
            .collect()
    }
}

/// Middle sets `∂(X_e)`, indexed like `tree_edges()`.
pub fn middle_sets(bd: &BranchDecomposition, g: &Graph) -> Result<Vec<BTreeSet<VertexId>>> {
    validate(bd, g).map_err(Error::input)?;
    let mut inside = vec![false; g.m()];
    Ok(bd
        .edge_sides()
        .into_iter()
        .map(|side| {
            for &e in &side {
                inside[e] = true;
            }
            let mut mid = BTreeSet::new();
            for &e in &side {
                let (u, v) = g.endpoints(e);
                for x in [u, v] {
                    if g.incident(x).iter().any(|&(_, f)| !inside[f]) {
                        mid.insert(x);
                    }
                }
            }
            for &e in &side {
                inside[e] = false;
            }
            mid
        })
        .collect())
}

/// Largest middle set; 0 for trees without edges.
pub fn width(bd: &BranchDecomposition, g: &Graph) -> Result<usize> {
    Ok(middle_sets(bd, g)?
        .iter()
        .map(BTreeSet::len)
        .max()
        .unwrap_or(0))
}

/// Ternary tree whose leaves are exactly the edges of `g`.
pub fn validate(bd: &BranchDecomposition, g: &Graph) -> Diagnostic {
    let n = bd.node_count();
    if n == 0 {
        return if g.m() == 0 {
            Ok(())
        } else {
            Err("bijection: empty tree for a graph with edges".into())
        };
    }
    let tree_edge_count: usize = bd.adj.iter().map(Vec::len).sum::<usize>() / 2;
    for u in 0..n {
        let mut ns = bd.adj[u].clone();
        ns.sort_unstable();
        ns.dedup();
        if ns.len() != bd.adj[u].len() || ns.contains(&u) {
            return Err(format!(
                "tree: node {} has a repeated or self neighbour",
                u + 1
            ));
        }
    }
    if tree_edge_count + 1 != n {
        return Err("tree: edge count is not nodes minus one".into());
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &w in &bd.adj[u] {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    if reached != n {
        return Err("tree: not connected".into());
    }
    for u in 0..n {
        let d = bd.adj[u].len();
        match bd.leaf[u] {
            Some(_) if d > 1 => {
                return Err(format!("not ternary: leaf {} has degree {}", u + 1, d))
            }
            None if d != 3 => {
                return Err(format!(
                    "not ternary: internal node {} has degree {}",
                    u + 1,
                    d
                ))
            }
            _ => {}
        }
    }
    let mut hit = vec![false; g.m()];
    for (_, e) in bd.leaves() {
        if e >= g.m() {
            return Err(format!("bijection: leaf mapped to unknown edge {}", e + 1));
        }
        if hit[e] {
            return Err(format!("bijection: edge {} on two leaves", e + 1));
        }
        hit[e] = true;
    }
    if let Some(e) = hit.iter().position(|&h| !h) {
        return Err(format!("bijection: edge {} has no leaf", e + 1));
    }
    Ok(())
}

/// Width-at-most-one decomposition of a star forest: a caterpillar with
/// each star's edges consecutive.
pub fn star_forest_decomposition(g: &Graph) -> BranchDecomposition {
    let centre = |e: EdgeId| {
        let (u, v) = g.endpoints(e);
        if g.degree(u) > 1 {
            u
        } else if g.degree(v) > 1 {
            v
        } else {
            u.min(v)
        }
    };
    let mut es: Vec<EdgeId> = g.edge_ids().collect();
    es.sort_by_key(|&e| (centre(e), e));
    BranchDecomposition::caterpillar(&es)
}

/// Splice `child` into `host` next to the leaf `at`: subdivide the leaf
/// edges on both sides and join the two new nodes.
pub(crate) fn splice(
    host: &mut BranchDecomposition,
    at: usize,
    child: &BranchDecomposition,
    child_at: usize,
) {
    let off = host.absorb(child);
    let c = child_at + off;
    let host_single = host.adj[at].is_empty();
    let child_single = host.adj[c].is_empty();
    match (host_single, child_single) {
        (true, true) => host.link(at, c),
        (true, false) => {
            let nb = host.adj[c][0];
            let s = host.subdivide(c, nb);
            host.link(s, at);
        }
        (false, true) => {
            let nb = host.adj[at][0];
            let s = host.subdivide(at, nb);
            host.link(s, c);
        }
        (false, false) => {
            let nb = host.adj[at][0];
            let s = host.subdivide(at, nb);
            let nbc = host.adj[c][0];
            let t = host.subdivide(c, nbc);
            host.link(s, t);
        }
    }
}

/// Combine decompositions of edge-disjoint parts covering `E(g)`. Parts
/// meeting at a vertex `v` are joined next to the least edges at `v`;
/// parts in different components are joined through the least edges.
pub fn compose_parts(g: &Graph, parts: &[BranchDecomposition]) -> Result<BranchDecomposition> {
    let mut owner = vec![usize::MAX; g.m()];
    for (p, bd) in parts.iter().enumerate() {
        for (_, e) in bd.leaves() {
            if e >= g.m() {
                return Err(Error::input(format!(
                    "part {} names unknown edge {}",
                    p + 1,
                    e + 1
                )));
            }
            if owner[e] != usize::MAX {
                return Err(Error::input(format!(
                    "overlapping edge coverage at edge {}",
                    e + 1
                )));
            }
            owner[e] = p;
        }
    }
    if let Some(e) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::input(format!(
            "missing block: edge {} is not covered",
            e + 1
        )));
    }
    if g.m() == 0 {
        return Ok(BranchDecomposition::empty());
    }
    if g.is_star_forest() {
        return Ok(star_forest_decomposition(g));
    }
    let live: Vec<usize> = (0..parts.len())
        .filter(|&p| parts[p].node_count() > 0)
        .collect();
    // least edge of each part at each of its vertices
    let mut at_vertex: Vec<BTreeMap<VertexId, EdgeId>> = vec![BTreeMap::new(); parts.len()];
    let mut parts_at: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.n()];
    for &p in &live {
        for (_, e) in parts[p].leaves() {
            let (u, v) = g.endpoints(e);
            for x in [u, v] {
                let slot = at_vertex[p].entry(x).or_insert(e);
                *slot = (*slot).min(e);
                parts_at[x].insert(p);
            }
        }
    }
    let least = |p: usize| parts[p].edges_covered()[0];
    let mut order = live.clone();
    order.sort_by_key(|&p| least(p));

    let mut done = vec![false; parts.len()];
    let mut out = BranchDecomposition::empty();
    for &start in &order {
        if done[start] {
            continue;
        }
        done[start] = true;
        if out.node_count() == 0 {
            out = parts[start].clone();
        } else {
            let at = out.leaf_of(out.edges_covered()[0]).expect("leaf");
            let child_at = parts[start].leaf_of(least(start)).expect("leaf");
            splice(&mut out, at, &parts[start], child_at);
        }
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for (&v, &f) in &at_vertex[p] {
                for &q in &parts_at[v] {
                    if done[q] {
                        continue;
                    }
                    done[q] = true;
                    let at = out.leaf_of(f).expect("leaf of parent edge");
                    let child_at = parts[q]
                        .leaf_of(at_vertex[q][&v])
                        .expect("leaf of child edge");
                    splice(&mut out, at, &parts[q], child_at);
                    queue.push_back(q);
                }
            }
        }
    }
    Ok(out)
}

/// Join decompositions of the blocks of `g`, each given with the block's
/// vertex set and leaves labelled by edge ids of `g`.
pub fn compose_blocks(
    g: &Graph,
    per_block: &[(Vec<VertexId>, BranchDecomposition)],
) -> Result<BranchDecomposition> {
    for (vs, bd) in per_block {
        let set: BTreeSet<VertexId> = vs.iter().copied().collect();
        for (_, e) in bd.leaves() {
            let (u, v) = g.endpoints(e);
            if !set.contains(&u) || !set.contains(&v) {
                return Err(Error::input(format!(
                    "edge {} lies outside its block",
                    e + 1
                )));
            }
        }
    }
    if per_block.len() == 1 && validate(&per_block[0].1, g).is_ok() {
        return Ok(per_block[0].1.clone());
    }
    let parts: Vec<BranchDecomposition> = per_block.iter().map(|(_, bd)| bd.clone()).collect();
    compose_parts(g, &parts)
}

/// Extend decompositions of `g - x` (leaves labelled by edge ids of `g`)
/// to `g`: apex edges are grouped by their non-apex end `v` and spliced as
/// a caterpillar next to the least edge of `g - x` at `v`; the remaining
/// apex edges form one caterpillar joined at the least leaf.
pub fn extend_over_apex(
    g: &Graph,
    x: &BTreeSet<VertexId>,
    per_block: &[BranchDecomposition],
) -> Result<BranchDecomposition> {
    if let Some(&v) = x.iter().find(|&&v| v >= g.n()) {
        return Err(Error::input(format!(
            "apex vertex {} is not in the graph",
            v + 1
        )));
    }
    let apex_edge = |e: EdgeId| {
        let (u, v) = g.endpoints(e);
        x.contains(&u) || x.contains(&v)
    };
    let rest: Vec<EdgeId> = g.edge_ids().filter(|&e| !apex_edge(e)).collect();
    let mut covered: Vec<EdgeId> = per_block.iter().flat_map(|b| b.edges_covered()).collect();
    covered.sort_unstable();
    if covered != rest {
        return Err(Error::input(
            "block decompositions must cover exactly the edges of g - x",
        ));
    }
    if g.is_star_forest() {
        return Ok(star_forest_decomposition(g));
    }
    let base = if rest.is_empty() {
        BranchDecomposition::empty()
    } else {
        let sub = g.edge_subgraph(&rest)?;
        let mut local = vec![usize::MAX; g.m()];
        for (i, &e) in rest.iter().enumerate() {
            local[e] = i;
        }
        let parts: Vec<BranchDecomposition> = per_block
            .iter()
            .map(|b| {
                let l: Vec<EdgeId> = (0..g.m()).map(|e| local[e]).collect();
                b.relabel(&l)
            })
            .collect();
        compose_parts(&sub.graph, &parts)?.relabel(&rest)
    };

    let mut least_rest: BTreeMap<VertexId, EdgeId> = BTreeMap::new();
    for &e in &rest {
        let (u, v) = g.endpoints(e);
        for w in [u, v] {
            let slot = least_rest.entry(w).or_insert(e);
            *slot = (*slot).min(e);
        }
    }
    let mut groups: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    let mut loose: Vec<(VertexId, EdgeId)> = Vec::new();
    for e in g.edge_ids().filter(|&e| apex_edge(e)) {
        let (u, v) = g.endpoints(e);
        let outer = if x.contains(&u) { v } else { u };
        if !x.contains(&outer) && least_rest.contains_key(&outer) {
            groups.entry(outer).or_default().push(e);
        } else {
            let key = if x.contains(&outer) {
                usize::MAX
            } else {
                outer
            };
            loose.push((key, e));
        }
    }
    let mut out = base;
    for (v, es) in groups {
        let cat = BranchDecomposition::caterpillar(&es);
        let at = out.leaf_of(least_rest[&v]).expect("leaf");
        let child_at = cat.leaf_of(es[0]).expect("leaf");
        splice(&mut out, at, &cat, child_at);
    }
    if !loose.is_empty() {
        loose.sort_unstable();
        let es: Vec<EdgeId> = loose.iter().map(|&(_, e)| e).collect();
        let cat = BranchDecomposition::caterpillar(&es);
        if out.node_count() == 0 {
            out = cat;
        } else {
            let at = out.leaf_of(out.edges_covered()[0]).expect("leaf");
            let child_at = cat.leaf_of(es[0]).expect("leaf");
            splice(&mut out, at, &cat, child_at);
        }
    }
    Ok(out)
}

/// Tree-decomposition: bags per tree node, optional root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub adj: Vec<Vec<usize>>,
    pub bags: Vec<BTreeSet<VertexId>>,
    pub root: Option<usize>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Tree shape, vertex and edge coverage, connected occupancy.
    pub fn validate(&self, g: &Graph) -> Diagnostic {
        let n = self.bags.len();
        if n == 0 || self.adj.len() != n {
            return Err("tree: no nodes".into());
        }
        let edges = self.tree_edges();
        if edges.len() + 1 != n {
            return Err("tree: edge count is not nodes minus one".into());
        }
        let connected = |allowed: &dyn Fn(usize) -> bool, start: usize| {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut stack = vec![start];
            let mut count = 1;
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] && allowed(w) {
                        seen[w] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
            count
        };
        if connected(&|_| true, 0) != n {
            return Err("tree: not connected".into());
        }
        for v in g.vertices() {
            let holders: Vec<usize> = (0..n).filter(|&t| self.bags[t].contains(&v)).collect();
            if holders.is_empty() {
                return Err(format!("vertex {} is in no bag", v + 1));
            }
            if connected(&|t| self.bags[t].contains(&v), holders[0]) != holders.len() {
                return Err(format!("bags holding vertex {} are not connected", v + 1));
            }
        }
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(format!("edge {} is in no bag", e + 1));
            }
        }
        Ok(())
    }
}

/// Bags: a leaf gets its edge's ends, an internal node the union of its
/// three middle sets. Forests get a direct width-one decomposition.
pub fn bd_to_tree_decomposition(bd: &BranchDecomposition, g: &Graph) -> Result<TreeDecomposition> {
    if g.m() + g.components().len() == g.n() {
        return Ok(forest_decomposition(g));
    }
    let mids = middle_sets(bd, g)?;
    let mut bags: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); bd.node_count()];
    for (i, &(a, b)) in bd.tree_edges().iter().enumerate() {
        for u in [a, b] {
            if bd.leaf_edge(u).is_none() {
                bags[u].extend(mids[i].iter().copied());
            }
        }
    }
    for (u, e) in bd.leaves() {
        let (x, y) = g.endpoints(e);
        bags[u].extend([x, y]);
    }
    let mut td = TreeDecomposition {
        adj: bd.adj.clone(),
        bags,
        root: None,
    };
    // isolated vertices hang off node 0
    for v in g.vertices().filter(|&v| g.degree(v) == 0) {
        let t = td.bags.len();
        td.bags.push(BTreeSet::from([v]));
        td.adj.push(vec![0]);
        td.adj[0].push(t);
    }
    Ok(td)
}

fn forest_decomposition(g: &Graph) -> TreeDecomposition {
    let mut adj: Vec<Vec<usize>> = Vec::new();
    let mut bags: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut node_of = vec![usize::MAX; g.n()];
    let mut anchor: Option<usize> = None;
    for comp in g.components() {
        let root = comp[0];
        let top = bags.len();
        bags.push(BTreeSet::from([root]));
        adj.push(Vec::new());
        node_of[root] = top;
        if let Some(a) = anchor {
            adj[a].push(top);
            adj[top].push(a);
        }
        anchor = Some(top);
        let mut queue = VecDeque::from([root]);
        let mut seen = BTreeSet::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in g.incident(v) {
                if seen.insert(w) {
                    let t = bags.len();
                    bags.push(BTreeSet::from([v, w]));
                    adj.push(vec![node_of[v]]);
                    adj[node_of[v]].push(t);
                    node_of[w] = t;
                    queue.push_back(w);
                }
            }
        }
    }
    TreeDecomposition {
        adj,
        bags,
        root: None,
    }
}

/// `b nodes N`, `bn <id> leaf <edge>` / `bn <id> internal`, `be a b`.
pub fn serialize_decomposition(bd: &BranchDecomposition) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "b nodes {}", bd.node_count());
    for u in 0..bd.node_count() {
        match bd.leaf[u] {
            Some(e) => {
                let _ = writeln!(out, "bn {} leaf {}", u + 1, e + 1);
            }
            None => {
                let _ = writeln!(out, "bn {} internal", u + 1);
            }
        }
    }
    for (a, b) in bd.tree_edges() {
        let _ = writeln!(out, "be {} {}", a + 1, b + 1);
    }
    out
}

pub fn parse_decomposition(text: &str) -> Result<BranchDecomposition> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (bd, rest) = parse_decomposition_lines(&mut lines)?;
    if let Some((no, l)) = rest {
        return Err(Error::parse(no, format!("unexpected line '{}'", l.trim())));
    }
    Ok(bd)
}

/// Reads a decomposition block and returns the first line it does not own.
pub(crate) fn parse_decomposition_lines<'a, I>(
    lines: &mut I,
) -> Result<(BranchDecomposition, Option<(usize, &'a str)>)>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    use crate::graph::parse_num;
    let mut bd: Option<BranchDecomposition> = None;
    let mut labelled: Vec<bool> = Vec::new();
    let mut last = 0;
    for (no, line) in lines.by_ref() {
        last = no;
        let t = line.trim();
        if t.is_empty() || t == "c" || t.starts_with("c ") {
            continue;
        }
        let w: Vec<&str> = t.split_whitespace().collect();
        match (w[0], bd.as_mut()) {
            ("b", None) => {
                if w.len() != 3 || w[1] != "nodes" {
                    return Err(Error::parse(no, "expected 'b nodes <N>'"));
                }
                let n: usize = parse_num(no, Some(w[2]))?;
                bd = Some(BranchDecomposition {
                    adj: vec![Vec::new(); n],
                    leaf: vec![None; n],
                });
                labelled = vec![false; n];
            }
            ("bn", Some(b)) => {
                let u: usize = parse_num(no, w.get(1).copied())?;
                if u == 0 || u > b.node_count() || labelled[u - 1] {
                    return Err(Error::parse(no, "node id out of range or repeated"));
                }
                labelled[u - 1] = true;
                match w.get(2).copied() {
                    Some("leaf") if w.len() == 4 => {
                        let e: usize = parse_num(no, Some(w[3]))?;
                        if e == 0 {
                            return Err(Error::parse(no, "edge ids are 1-indexed"));
                        }
                        b.leaf[u - 1] = Some(e - 1);
                    }
                    Some("internal") if w.len() == 3 => {}
                    _ => {
                        return Err(Error::parse(
                            no,
                            "expected 'bn <id> leaf <edge>' or 'bn <id> internal'",
                        ))
                    }
                }
            }
            ("be", Some(b)) => {
                let x: usize = parse_num(no, w.get(1).copied())?;
                let y: usize = parse_num(no, w.get(2).copied())?;
                if x == 0 || y == 0 || x > b.node_count() || y > b.node_count() || w.len() != 3 {
                    return Err(Error::parse(no, "tree edge endpoint out of range"));
                }
                b.link(x - 1, y - 1);
            }
            (_, None) => return Err(Error::parse(no, "expected 'b nodes <N>' header")),
            _ => return Ok((bd.expect("header seen"), Some((no, line)))),
        }
    }
    bd.map(|b| (b, None))
        .ok_or_else(|| Error::parse(last.max(1), "missing decomposition header"))
}
