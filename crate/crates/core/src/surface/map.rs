//! Dart-level signed rotation systems. Multigraphs and loops are allowed
//! here; the public embedding types sit on top of this.

/// Edge `e` owns darts `2e` (leaving its first end) and `2e + 1`.
#[derive(Clone, Debug)]
pub(crate) struct Map {
    pub tail: Vec<usize>,
    pub sign: Vec<i8>,
    pub rot: Vec<Vec<usize>>,
    pub pos: Vec<usize>,
}

/// A face-tracing state: leave `tail(dart)` along `dart` with local
/// orientation `orient`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side {
    pub dart: usize,
    pub orient: i8,
}

impl Side {
    pub fn edge(&self) -> usize {
        self.dart / 2
    }
}

pub(crate) fn state_index(s: Side) -> usize {
    2 * s.dart + usize::from(s.orient < 0)
}

impl Map {
    pub fn new(n: usize, ends: &[(usize, usize)], sign: Vec<i8>, rot: Vec<Vec<usize>>) -> Self {
        let mut tail = vec![0; 2 * ends.len()];
        for (e, &(u, v)) in ends.iter().enumerate() {
            tail[2 * e] = u;
            tail[2 * e + 1] = v;
        }
        debug_assert_eq!(rot.len(), n);
        let mut map = Map {
            tail,
            sign,
            rot,
            pos: Vec::new(),
        };
        map.reindex();
        map
    }

    pub fn reindex(&mut self) {
        self.pos = vec![usize::MAX; self.tail.len()];
        for r in &self.rot {
            for (i, &d) in r.iter().enumerate() {
                self.pos[d] = i;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.rot.len()
    }

    pub fn m(&self) -> usize {
        self.sign.len()
    }

    pub fn head(&self, d: usize) -> usize {
        self.tail[d ^ 1]
    }

    pub fn succ(&self, d: usize) -> usize {
        let r = &self.rot[self.tail[d]];
        r[(self.pos[d] + 1) % r.len()]
    }

    pub fn pred(&self, d: usize) -> usize {
        let r = &self.rot[self.tail[d]];
        r[(self.pos[d] + r.len() - 1) % r.len()]
    }

    pub fn next(&self, s: Side) -> Side {
        let o = s.orient * self.sign[s.edge()];
        let back = s.dart ^ 1;
        let dart = if o > 0 {
            self.succ(back)
        } else {
            self.pred(back)
        };
        Side { dart, orient: o }
    }

    /// The same edge traversed the other way, as seen by the reverse walk.
    pub fn reverse(&self, s: Side) -> Side {
        Side {
            dart: s.dart ^ 1,
            orient: -s.orient * self.sign[s.edge()],
        }
    }

    /// Face walks. Each walk starts at the least untraced state, ordered by
    /// edge, then tail vertex, then `+1` before `-1`.
    pub fn faces(&self) -> Vec<Vec<Side>> {
        let mut seen = vec![false; 2 * self.tail.len()];
        let mut faces = Vec::new();
        for e in 0..self.m() {
            let (a, b) = (2 * e, 2 * e + 1);
            let darts = if self.tail[a] <= self.tail[b] {
                [a, b]
            } else {
                [b, a]
            };
            for d in darts {
                for orient in [1i8, -1] {
                    let start = Side { dart: d, orient };
                    if seen[state_index(start)] {
                        continue;
                    }
                    let mut walk = Vec::new();
                    let mut s = start;
                    loop {
                        seen[state_index(s)] = true;
                        seen[state_index(self.reverse(s))] = true;
                        walk.push(s);
                        s = self.next(s);
                        if s == start {
                            break;
                        }
                    }
                    faces.push(walk);
                }
            }
        }
        faces
    }

    /// Connected components over vertices (edges join their ends).
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &d in &self.rot[v] {
                    let w = self.head(d);
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Euler genus summed over components, given traced faces. Returns
    /// `None` if some component has negative genus (malformed map).
    pub fn euler_genus(&self, faces: &[Vec<Side>]) -> Option<usize> {
        let (comp, count) = self.components();
        let mut nv = vec![0i64; count];
        let mut ne = vec![0i64; count];
        let mut nf = vec![0i64; count];
        for v in 0..self.n() {
            nv[comp[v]] += 1;
        }
        for e in 0..self.m() {
            ne[comp[self.tail[2 * e]]] += 1;
        }
        for f in faces {
            nf[comp[self.tail[f[0].dart]]] += 1;
        }
        let mut total = 0usize;
        for c in 0..count {
            if ne[c] == 0 {
                continue;
            }
            let g = 2 - nv[c] + ne[c] - nf[c];
            if g < 0 {
                return None;
            }
            total += g as usize;
        }
        Some(total)
    }

    /// Per-component Euler genus, indexed like `components()`.
    pub fn component_genus(&self, faces: &[Vec<Side>]) -> Vec<i64> {
        let (comp, count) = self.components();
        let mut g = vec![2i64; count];
        let mut has_edge = vec![false; count];
        for v in 0..self.n() {
            g[comp[v]] -= 1;
        }
        for e in 0..self.m() {
            g[comp[self.tail[2 * e]]] += 1;
            has_edge[comp[self.tail[2 * e]]] = true;
        }
        for f in faces {
            g[comp[self.tail[f[0].dart]]] -= 1;
        }
        for c in 0..count {
            if !has_edge[c] {
                g[c] = 0;
            }
        }
        g
    }

    /// Insert a new edge between two corners and return its id. A corner is
    /// given by a face-walk state `s` (the corner sits just before `s.dart`
    /// at `tail(s.dart)`); the sign makes the edge split the face.
    pub fn insert_chord(&mut self, from: Side, to: Side) -> usize {
        let e = self.sign.len();
        let (u, v) = (self.tail[from.dart], self.tail[to.dart]);
        self.tail.push(u);
        self.tail.push(v);
        self.sign.push(from.orient * to.orient);
        self.pos.push(usize::MAX);
        self.pos.push(usize::MAX);
        self.place(2 * e, from);
        self.place(2 * e + 1, to);
        e
    }

    fn place(&mut self, new: usize, at: Side) {
        let v = self.tail[at.dart];
        let i = self.rot[v]
            .iter()
            .position(|&d| d == at.dart)
            .expect("dart at vertex");
        let idx = if at.orient > 0 { i } else { i + 1 };
        self.rot[v].insert(idx, new);
        for (j, &d) in self.rot[v].iter().enumerate() {
            self.pos[d] = j;
        }
    }
}
