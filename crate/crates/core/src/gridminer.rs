//! Grid-minor models: validation on any graph, extraction on planar ones.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{parse_num, Graph, VertexId};
use crate::surface::EmbeddedGraph;
use crate::Diagnostic;

/// Branch sets of an `r x r` grid, row-major: `(i, j)` at `i * r + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridModel {
    pub r: usize,
    pub branch_sets: Vec<BTreeSet<VertexId>>,
}

impl GridModel {
    pub fn branch_set(&self, i: usize, j: usize) -> &BTreeSet<VertexId> {
        &self.branch_sets[i * self.r + j]
    }

    /// Every vertex mapped to itself, for a host that is the grid.
    pub fn identity(r: usize) -> Self {
        GridModel {
            r,
            branch_sets: (0..r * r).map(|v| BTreeSet::from([v])).collect(),
        }
    }
}

fn grid_edges(r: usize) -> impl Iterator<Item = ((usize, usize), (usize, usize))> {
    (0..r).flat_map(move |i| {
        (0..r).flat_map(move |j| {
            let right = (j + 1 < r).then_some(((i, j), (i, j + 1)));
            let down = (i + 1 < r).then_some(((i, j), (i + 1, j)));
            right.into_iter().chain(down)
        })
    })
}

pub fn validate_grid_model(m: &GridModel, g: &Graph) -> Diagnostic {
    let r = m.r;
    if m.branch_sets.len() != r * r {
        return Err(format!(
            "grid: expected {} branch sets, found {}",
            r * r,
            m.branch_sets.len()
        ));
    }
    let mut owner = vec![usize::MAX; g.n()];
    for (k, set) in m.branch_sets.iter().enumerate() {
        let (i, j) = (k / r + 1, k % r + 1);
        if set.is_empty() {
            return Err(format!("branch set ({i},{j}) is empty"));
        }
        for &v in set {
            if v >= g.n() {
                return Err(format!(
                    "branch set ({i},{j}) names unknown vertex {}",
                    v + 1
                ));
            }
            if owner[v] != usize::MAX {
                let o = owner[v];
                return Err(format!(
                    "branch sets ({},{}) and ({i},{j}) share vertex {}",
                    o / r + 1,
                    o % r + 1,
                    v + 1
                ));
            }
            owner[v] = k;
        }
        let start = *set.iter().next().expect("non-empty");
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in g.incident(v) {
                if set.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if seen.len() != set.len() {
            return Err(format!("branch set ({i},{j}) is disconnected"));
        }
    }
    for ((a, b), (c, d)) in grid_edges(r) {
        let (x, y) = (a * r + b, c * r + d);
        let realized = m.branch_sets[x]
            .iter()
            .any(|&v| g.incident(v).iter().any(|&(w, _)| owner[w] == y));
        if !realized {
            return Err(format!(
                "grid edge ({},{})-({},{}) is not realized",
                a + 1,
                b + 1,
                c + 1,
                d + 1
            ));
        }
    }
    Ok(())
}

/// Node budget of the placement search per connector length.
const SEARCH_BUDGET: u64 = 2_000_000;

/// Longest connector path tried between adjacent branch vertices.
const MAX_CONNECTOR: usize = 4;

/// Search for an `r x r` grid topologically embedded in a planar graph:
/// grid vertices go to distinct host vertices in row-major order, grid
/// edges to internally disjoint connector paths, with connectors of
/// length 1, then 2, and so on. Connector interiors join the branch set
/// of their upper or left end. `None` when the search fails.
pub fn find_grid_planar(e: &EmbeddedGraph, r: usize) -> Result<Option<GridModel>> {
    if r == 0 {
        return Err(Error::input("grid side must be positive"));
    }
    if e.genus() != 0 {
        return Err(Error::contract("grid extraction needs a genus-0 embedding"));
    }
    let g = e.graph();
    if g.n() < r * r {
        return Ok(None);
    }
    if r == 1 {
        return Ok(Some(GridModel::identity(1)));
    }
    for len in 1..=MAX_CONNECTOR {
        let mut s = Placement::new(g, r, len);
        if s.place(0) {
            let model = s.model();
            debug_assert!(validate_grid_model(&model, g).is_ok());
            return Ok(Some(model));
        }
    }
    Ok(None)
}

struct Placement<'a> {
    g: &'a Graph,
    r: usize,
    max_len: usize,
    used: Vec<bool>,
    phi: Vec<VertexId>,
    /// connector interiors owned by each grid vertex
    owned: Vec<Vec<VertexId>>,
    budget: u64,
}

impl<'a> Placement<'a> {
    fn new(g: &'a Graph, r: usize, max_len: usize) -> Self {
        Placement {
            g,
            r,
            max_len,
            used: vec![false; g.n()],
            phi: vec![usize::MAX; r * r],
            owned: vec![Vec::new(); r * r],
            budget: SEARCH_BUDGET,
        }
    }

    fn grid_degree(&self, k: usize) -> usize {
        let (i, j) = (k / self.r, k % self.r);
        let last = self.r - 1;
        usize::from(i > 0) + usize::from(i < last) + usize::from(j > 0) + usize::from(j < last)
    }

    /// Grid neighbours of `k` placed after it.
    fn pending(&self, k: usize) -> usize {
        let (i, j) = (k / self.r, k % self.r);
        usize::from(i + 1 < self.r) + usize::from(j + 1 < self.r)
    }

    fn free_degree(&self, v: VertexId) -> usize {
        self.g
            .incident(v)
            .iter()
            .filter(|&&(w, _)| !self.used[w])
            .count()
    }

    /// Placed vertices whose later neighbours still need free edges.
    fn feasible(&self, upto: usize) -> bool {
        let lo = upto.saturating_sub(self.r + 1);
        (lo..=upto).all(|k| {
            let (i, j) = (k / self.r, k % self.r);
            let later: usize = [(i, j + 1), (i + 1, j)]
                .into_iter()
                .filter(|&(a, b)| a < self.r && b < self.r && a * self.r + b > upto)
                .count();
            later == 0 || self.free_degree(self.phi[k]) >= later
        })
    }

    fn place(&mut self, k: usize) -> bool {
        if k == self.r * self.r {
            return true;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let (i, j) = (k / self.r, k % self.r);
        let deg = self.grid_degree(k);
        let left = (j > 0).then(|| self.phi[k - 1]);
        let up = (i > 0).then(|| self.phi[k - self.r]);
        let candidates: Vec<(VertexId, Vec<VertexId>)> = match (left, up) {
            (None, None) => {
                let mut xs: Vec<VertexId> = self
                    .g
                    .vertices()
                    .filter(|&x| self.g.degree(x) >= deg)
                    .collect();
                xs.sort_by_key(|&x| (self.g.degree(x), x));
                xs.into_iter().map(|x| (x, Vec::new())).collect()
            }
            (Some(a), None) | (None, Some(a)) => self.connectors(a, deg),
            (Some(a), Some(_)) => self.connectors(a, deg),
        };
        for (x, path) in candidates {
            if self.used[x] {
                continue;
            }
            for &v in &path {
                self.used[v] = true;
            }
            self.used[x] = true;
            let second = match up.filter(|_| left.is_some()) {
                Some(b) => match self.connect(b, x) {
                    Some(p) => Some(p),
                    None => {
                        self.release(&path, x);
                        continue;
                    }
                },
                None => None,
            };
            if let Some(p) = &second {
                for &v in p {
                    self.used[v] = true;
                }
            }
            if self.free_degree(x) < self.pending(k) {
                if let Some(p) = &second {
                    self.release(p, usize::MAX);
                }
                self.release(&path, x);
                continue;
            }
            self.phi[k] = x;
            // the first connector comes from the left (or from above in column 0)
            let first_owner = if left.is_some() {
                k - 1
            } else {
                k.saturating_sub(self.r)
            };
            if k > 0 {
                self.owned[first_owner].extend(&path);
            }
            if let Some(p) = &second {
                self.owned[k - self.r].extend(p);
            }
            if self.feasible(k) && self.place(k + 1) {
                return true;
            }
            if k > 0 {
                let n = self.owned[first_owner].len() - path.len();
                self.owned[first_owner].truncate(n);
            }
            if let Some(p) = &second {
                let n = self.owned[k - self.r].len() - p.len();
                self.owned[k - self.r].truncate(n);
                self.release(p, usize::MAX);
            }
            self.phi[k] = usize::MAX;
            self.release(&path, x);
            if self.budget == 0 {
                return false;
            }
        }
        false
    }

    fn release(&mut self, path: &[VertexId], x: VertexId) {
        for &v in path {
            self.used[v] = false;
        }
        if x != usize::MAX {
            self.used[x] = false;
        }
    }

    /// Free endpoints `x` of degree at least `deg` reachable from `a` by a
    /// path of free interior vertices, with the interiors; shortest first.
    fn connectors(&self, a: VertexId, deg: usize) -> Vec<(VertexId, Vec<VertexId>)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut on_path = BTreeSet::new();
        self.extend(a, deg, &mut path, &mut on_path, &mut out);
        out.sort_by(|p, q| (p.1.len(), p.0, &p.1).cmp(&(q.1.len(), q.0, &q.1)));
        out
    }

    fn extend(
        &self,
        v: VertexId,
        deg: usize,
        path: &mut Vec<VertexId>,
        on_path: &mut BTreeSet<VertexId>,
        out: &mut Vec<(VertexId, Vec<VertexId>)>,
    ) {
        for &(w, _) in self.g.incident(v) {
            if self.used[w] || on_path.contains(&w) {
                continue;
            }
            if self.g.degree(w) >= deg {
                out.push((w, path.clone()));
            }
            if path.len() + 1 < self.max_len {
                path.push(w);
                on_path.insert(w);
                self.extend(w, deg, path, on_path, out);
                on_path.remove(&w);
                path.pop();
            }
        }
    }

    /// Shortest free interior joining `b` to `x`, within the length cap.
    fn connect(&self, b: VertexId, x: VertexId) -> Option<Vec<VertexId>> {
        let n = self.g.n();
        let mut prev = vec![usize::MAX; n];
        let mut dist = vec![usize::MAX; n];
        dist[b] = 0;
        let mut queue = VecDeque::from([b]);
        while let Some(v) = queue.pop_front() {
            if dist[v] == self.max_len {
                continue;
            }
            for &(w, _) in self.g.incident(v) {
                if w == x {
                    let mut interior = Vec::new();
                    let mut y = v;
                    while y != b {
                        interior.push(y);
                        y = prev[y];
                    }
                    interior.reverse();
                    return Some(interior);
                }
                if self.used[w] || dist[w] != usize::MAX {
                    continue;
                }
                dist[w] = dist[v] + 1;
                prev[w] = v;
                queue.push_back(w);
            }
        }
        None
    }

    fn model(&self) -> GridModel {
        GridModel {
            r: self.r,
            branch_sets: (0..self.r * self.r)
                .map(|k| {
                    let mut s: BTreeSet<VertexId> = self.owned[k].iter().copied().collect();
                    s.insert(self.phi[k]);
                    s
                })
                .collect(),
        }
    }
}

/// `grid <r>` then `bs <i> <j> <v..>` lines, all 1-indexed.
pub fn serialize_grid_model(m: &GridModel) -> String {
    let mut out = format!("grid {}\n", m.r);
    for (k, set) in m.branch_sets.iter().enumerate() {
        let _ = write!(out, "bs {} {}", k / m.r + 1, k % m.r + 1);
        for &v in set {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

pub fn parse_grid_model(text: &str) -> Result<GridModel> {
    let mut r = None;
    let mut sets: Vec<Option<BTreeSet<VertexId>>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        let t = line.trim();
        if t.is_empty() || t == "c" || t.starts_with("c ") {
            continue;
        }
        let mut words = t.split_whitespace();
        match words.next() {
            Some("grid") if r.is_none() => {
                let side: usize = parse_num(no, words.next())?;
                if side == 0 {
                    return Err(Error::parse(no, "grid side must be positive"));
                }
                r = Some(side);
                sets = vec![None; side * side];
            }
            Some("bs") => {
                let side = r.ok_or_else(|| Error::parse(no, "'bs' before 'grid'"))?;
                let a: usize = parse_num(no, words.next())?;
                let b: usize = parse_num(no, words.next())?;
                if a == 0 || b == 0 || a > side || b > side {
                    return Err(Error::parse(no, "grid position out of range"));
                }
                let mut set = BTreeSet::new();
                for w in words {
                    let v: usize = parse_num(no, Some(w))?;
                    if v == 0 {
                        return Err(Error::parse(no, "vertex ids start at 1"));
                    }
                    set.insert(v - 1);
                }
                let slot = &mut sets[(a - 1) * side + b - 1];
                if slot.is_some() {
                    return Err(Error::parse(no, "second line for a grid position"));
                }
                *slot = Some(set);
            }
            _ => return Err(Error::parse(no, format!("unexpected line '{t}'"))),
        }
    }
    let r = r.ok_or_else(|| Error::parse(1, "missing 'grid' line"))?;
    let branch_sets = sets
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            s.ok_or_else(|| {
                Error::input(format!("no branch set for ({},{})", k / r + 1, k % r + 1))
            })
        })
        .collect::<Result<_>>()?;
    Ok(GridModel { r, branch_sets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_model_validates() {
        let e = fixtures::grid(3, 3);
        assert_eq!(
            validate_grid_model(&GridModel::identity(3), e.graph()),
            Ok(())
        );
    }

    #[test]
    fn broken_models_are_named() {
        let e = fixtures::grid(3, 3);
        let mut m = GridModel::identity(3);
        m.branch_sets[0] = BTreeSet::from([0, 8]);
        m.branch_sets[8] = BTreeSet::from([4]);
        m.branch_sets[4] = BTreeSet::from([7]);
        m.branch_sets[7] = BTreeSet::from([5]);
        m.branch_sets[5] = BTreeSet::from([1]);
        m.branch_sets[1] = BTreeSet::new();
        assert!(validate_grid_model(&m, e.graph()).is_err());
        let mut d = GridModel::identity(3);
        d.branch_sets[0] = BTreeSet::from([0, 8]);
        d.branch_sets[8] = BTreeSet::from([2]);
        d.branch_sets[2] = BTreeSet::from([7]);
        assert!(validate_grid_model(&d, e.graph())
            .unwrap_err()
            .contains("disconnected"));
    }

    #[test]
    fn small_hosts() {
        assert!(find_grid_planar(&fixtures::cycle(4), 3).unwrap().is_none());
        let m = find_grid_planar(&fixtures::grid(4, 4), 4).unwrap().unwrap();
        assert_eq!(
            validate_grid_model(&m, fixtures::grid(4, 4).graph()),
            Ok(())
        );
    }
}
