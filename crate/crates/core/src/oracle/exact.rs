use std::collections::HashMap;

use rayon::prelude::*;

use crate::branchdecomp::{width, BranchDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest edge count the exhaustive mode accepts.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Edge counts above this are out of reach for either mode.
const MASK_LIMIT: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Full dynamic program over edge subsets.
    Exhaustive,
    /// Width-bounded search from a lower bound upwards.
    BranchAndBound,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub exact_bw: usize,
    pub optimal_bd: BranchDecomposition,
    /// subsets (exhaustive) or memo entries (branch-and-bound) examined
    pub search_stats: u64,
}

/// Exact branchwidth in exhaustive mode.
pub fn exact_bw_bruteforce(g: &Graph) -> Result<OracleResult> {
    exact_bw(g, OracleMode::Exhaustive)
}

/// Edges are bits; the tree is rooted at the leaf of the last edge and
/// every other subtree is a subset of the remaining edges.
struct Cuts {
    inc: Vec<u64>,
    full: u64,
}

impl Cuts {
    fn new(g: &Graph) -> Self {
        let inc = g
            .vertices()
            .map(|v| {
                g.incident(v)
                    .iter()
                    .fold(0u64, |acc, &(_, e)| acc | (1 << e))
            })
            .collect();
        Cuts {
            inc,
            full: if g.m() == 64 {
                u64::MAX
            } else {
                (1u64 << g.m()) - 1
            },
        }
    }

    fn boundary(&self, s: u64) -> usize {
        let out = self.full & !s;
        self.inc
            .iter()
            .filter(|&&i| i & s != 0 && i & out != 0)
            .count()
    }
}

/// Non-empty proper parts `a` of `s` that contain its lowest bit, in
/// increasing order.
fn halves(s: u64) -> impl Iterator<Item = u64> {
    let low = s & s.wrapping_neg();
    let rest = s & !low;
    let mut r = 0u64;
    let mut done = false;
    std::iter::from_fn(move || {
        while !done {
            let a = low | r;
            if r == rest {
                done = true;
            } else {
                r = (r.wrapping_sub(rest)) & rest;
            }
            if a != s {
                return Some(a);
            }
        }
        None
    })
}

pub fn exact_bw(g: &Graph, mode: OracleMode) -> Result<OracleResult> {
    let m = g.m();
    if m > MASK_LIMIT {
        return Err(Error::Mode(format!(
            "{m} edges exceed the oracle limit of {MASK_LIMIT}"
        )));
    }
    if mode == OracleMode::Exhaustive && m > EXHAUSTIVE_LIMIT {
        return Err(Error::Mode(format!(
            "{m} edges exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}"
        )));
    }
    match m {
        0 => {
            return Ok(OracleResult {
                exact_bw: 0,
                optimal_bd: BranchDecomposition::empty(),
                search_stats: 0,
            })
        }
        1 => {
            return Ok(OracleResult {
                exact_bw: 0,
                optimal_bd: BranchDecomposition::single(0),
                search_stats: 0,
            })
        }
        _ => {}
    }
    let cuts = Cuts::new(g);
    let rest = cuts.full & !(1u64 << (m - 1));
    let (w, choice, stats) = match mode {
        OracleMode::Exhaustive => exhaustive(&cuts, rest),
        OracleMode::BranchAndBound => bounded(g, &cuts, rest),
    };
    let mut bd = BranchDecomposition::empty();
    let root = bd.add_node(Some(m - 1));
    let top = build(&choice, rest, &mut bd);
    bd.link(root, top);
    debug_assert_eq!(width(&bd, g).ok(), Some(w));
    Ok(OracleResult {
        exact_bw: w,
        optimal_bd: bd,
        search_stats: stats,
    })
}

fn build(choice: &dyn Fn(u64) -> u64, s: u64, bd: &mut BranchDecomposition) -> usize {
    if s.count_ones() == 1 {
        return bd.add_node(Some(s.trailing_zeros() as usize));
    }
    let a = choice(s);
    let u = bd.add_node(None);
    let x = build(choice, a, bd);
    let y = build(choice, s & !a, bd);
    bd.link(u, x);
    bd.link(u, y);
    u
}

type Choice<'a> = Box<dyn Fn(u64) -> u64 + 'a>;

/// Table over all subsets of the non-root edges; the witness takes the
/// first optimal split.
fn exhaustive(cuts: &Cuts, rest: u64) -> (usize, Choice<'static>, u64) {
    let size = (rest + 1) as usize;
    let mut best = vec![0u8; size];
    let mut arg = vec![0u64; size];
    let mut stats = 0u64;
    for s in 1..=rest {
        let here = cuts.boundary(s) as u8;
        if s.count_ones() == 1 {
            best[s as usize] = here;
            continue;
        }
        let mut low = u8::MAX;
        let mut pick = 0;
        for a in halves(s) {
            stats += 1;
            let w = best[a as usize].max(best[(s & !a) as usize]);
            if w < low {
                low = w;
                pick = a;
            }
        }
        best[s as usize] = here.max(low);
        arg[s as usize] = pick;
    }
    let w = best[rest as usize] as usize;
    (w, Box::new(move |s| arg[s as usize]), stats)
}

/// Decide width `k` for increasing `k` with a memo of feasible subsets.
fn bounded<'a>(g: &Graph, cuts: &'a Cuts, rest: u64) -> (usize, Choice<'a>, u64) {
    let lower = if g.is_star_forest() { 0 } else { 2 };
    let mut k = lower;
    loop {
        let mut memo: HashMap<u64, Option<u64>> = HashMap::new();
        if feasible_top(cuts, rest, k, &mut memo) {
            let stats = memo.len() as u64;
            return (
                k,
                Box::new(move |s| memo[&s].expect("feasible split")),
                stats,
            );
        }
        k += 1;
    }
}

fn feasible_top(cuts: &Cuts, rest: u64, k: usize, memo: &mut HashMap<u64, Option<u64>>) -> bool {
    if cuts.boundary(rest) > k {
        return false;
    }
    if rest.count_ones() == 1 {
        memo.insert(rest, Some(rest));
        return true;
    }
    // first-level splits are tried in parallel; the least feasible one wins
    let firsts: Vec<u64> = halves(rest)
        .filter(|&a| cuts.boundary(a) <= k && cuts.boundary(rest & !a) <= k)
        .collect();
    let found = firsts.par_iter().find_first(|&&a| {
        let mut local = HashMap::new();
        feasible(cuts, a, k, &mut local) && feasible(cuts, rest & !a, k, &mut local)
    });
    let Some(&a) = found else { return false };
    let ok = feasible(cuts, a, k, memo) && feasible(cuts, rest & !a, k, memo);
    debug_assert!(ok);
    memo.insert(rest, Some(a));
    true
}

fn feasible(cuts: &Cuts, s: u64, k: usize, memo: &mut HashMap<u64, Option<u64>>) -> bool {
    if s.count_ones() == 1 {
        memo.insert(s, Some(s));
        return true;
    }
    if let Some(r) = memo.get(&s) {
        return r.is_some();
    }
    for a in halves(s) {
        let b = s & !a;
        if cuts.boundary(a) <= k
            && cuts.boundary(b) <= k
            && feasible(cuts, a, k, memo)
            && feasible(cuts, b, k, memo)
        {
            memo.insert(s, Some(a));
            return true;
        }
    }
    memo.insert(s, None);
    false
}

/// Every leaf-labelled ternary tree on `m` leaves, by inserting leaf `i`
/// into each edge of every tree on the first `i` leaves.
pub fn enumerate_decompositions(m: usize) -> Vec<BranchDecomposition> {
    match m {
        0 => return vec![BranchDecomposition::empty()],
        1 => return vec![BranchDecomposition::single(0)],
        2 => return vec![BranchDecomposition::caterpillar(&[0, 1])],
        _ => {}
    }
    let mut trees = vec![BranchDecomposition::caterpillar(&[0, 1, 2])];
    for leaf in 3..m {
        let mut next = Vec::new();
        for t in &trees {
            for (a, b) in t.tree_edges() {
                let mut u = t.clone();
                let s = u.subdivide(a, b);
                let l = u.add_node(Some(leaf));
                u.link(s, l);
                next.push(u);
            }
        }
        trees = next;
    }
    trees
}
