//! Approximate branchwidth on surfaces by cutting along short
//! non-contractible nooses until every piece is planar.

use std::collections::BTreeSet;

use crate::branchdecomp::{extend_over_apex, validate, width, BranchDecomposition};
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::ratcatcher::planar_decomposition_capped;
use crate::surface::{
    cut_along_noose, shortest_noncontractible_noose, EmbeddedGraph, Noose, Representativity,
};
use crate::Diagnostic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    /// A piece of positive genus whose shortest non-contractible noose
    /// meets at least `value` vertices.
    Representativity,
    /// A planar piece whose branchwidth exceeds `value - 1`.
    RatcatcherReject,
}

/// The piece a certificate talks about, in its own embedding.
#[derive(Clone, Debug)]
pub struct Witness {
    /// Position of the piece in processing order.
    pub piece: usize,
    pub embedding: EmbeddedGraph,
    /// piece vertex -> input vertex
    pub vertex_map: Vec<VertexId>,
    /// The shortest noose found, for representativity certificates.
    pub noose: Option<Noose>,
}

/// Evidence that the input has branchwidth at least `value`.
#[derive(Clone, Debug)]
pub struct LowerBoundCertificate {
    pub kind: CertificateKind,
    pub value: usize,
    pub witness: Witness,
    /// `(round, vertex)` deletions made before the witness was found.
    pub apex_trace: Vec<(usize, VertexId)>,
}

impl LowerBoundCertificate {
    /// Re-establish the premise on the recorded piece.
    pub fn replay(&self) -> Diagnostic {
        let emb = &self.witness.embedding;
        match self.kind {
            CertificateKind::Representativity => {
                if emb.genus() == 0 {
                    return Err("witness embedding has genus 0".into());
                }
                let noose = self
                    .witness
                    .noose
                    .as_ref()
                    .ok_or("witness carries no noose")?;
                noose.check(emb)?;
                if noose.len() < self.value {
                    return Err(format!(
                        "recorded noose meets {} < {} vertices",
                        noose.len(),
                        self.value
                    ));
                }
                match shortest_noncontractible_noose(emb).length() {
                    Some(l) if l >= self.value => Ok(()),
                    Some(l) => Err(format!("a non-contractible noose of length {l} exists")),
                    None => Err("no non-contractible noose exists".into()),
                }
            }
            CertificateKind::RatcatcherReject => {
                match planar_decomposition_capped(emb, self.value - 1) {
                    Ok(None) => Ok(()),
                    Ok(Some((w, _))) => Err(format!("planar piece has branchwidth {w}")),
                    Err(e) => Err(e.to_string()),
                }
            }
        }
    }
}

/// A decomposition of width at most `genus * (k - 1) + k`.
#[derive(Clone, Debug)]
pub struct GenusDecomposition {
    pub bd: BranchDecomposition,
    pub width: usize,
    pub bound: usize,
    pub apex_trace: Vec<(usize, VertexId)>,
}

#[derive(Clone, Debug)]
pub enum GenusOutcome {
    LowerBound(LowerBoundCertificate),
    Decomposition(GenusDecomposition),
}

struct Piece {
    embedding: EmbeddedGraph,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<usize>,
    round: usize,
}

/// Either certify `bw >= k` or build a decomposition of width at most
/// `genus * (k - 1) + k`.
pub fn approx_bw_bounded_genus(e: &EmbeddedGraph, k: usize) -> Result<GenusOutcome> {
    approx(e, k, true)
}

/// The certificate `approx_bw_bounded_genus` would return, without
/// assembling a decomposition otherwise.
pub(crate) fn certify(e: &EmbeddedGraph, k: usize) -> Result<Option<LowerBoundCertificate>> {
    Ok(match approx(e, k, false)? {
        GenusOutcome::LowerBound(c) => Some(c),
        GenusOutcome::Decomposition(_) => None,
    })
}

fn approx(e: &EmbeddedGraph, k: usize, build: bool) -> Result<GenusOutcome> {
    if k == 0 {
        return Err(Error::input("k must be positive"));
    }
    let g = e.graph();
    let bound = e.genus() * (k - 1) + k;
    let mut pending: Vec<Piece> = Vec::new();
    for comp in g.components() {
        let (emb, sub) = e.induced(&comp)?;
        pending.push(Piece {
            embedding: emb,
            vertex_map: sub.vertex_map,
            edge_map: sub.edge_map,
            round: 0,
        });
    }
    let mut trace: Vec<(usize, VertexId)> = Vec::new();
    let mut parts: Vec<BranchDecomposition> = Vec::new();
    let mut processed = 0;
    while !pending.is_empty() {
        // highest genus first, then least input vertex
        let next = (0..pending.len())
            .max_by_key(|&i| {
                (
                    pending[i].embedding.genus(),
                    std::cmp::Reverse(pending[i].vertex_map.iter().min().copied()),
                )
            })
            .expect("non-empty");
        let piece = pending.swap_remove(next);
        let id = processed;
        processed += 1;
        let emb = &piece.embedding;
        if emb.genus() == 0 {
            match planar_decomposition_capped(emb, k - 1)? {
                None => {
                    return Ok(GenusOutcome::LowerBound(certificate(
                        CertificateKind::RatcatcherReject,
                        k,
                        id,
                        &piece,
                        None,
                        &trace,
                    )))
                }
                Some((_, bd)) => {
                    if build {
                        parts.push(bd.relabel(&piece.edge_map));
                    }
                }
            }
            continue;
        }
        let Representativity::Finite { noose, length } = shortest_noncontractible_noose(emb) else {
            return Err(Error::internal(
                "positive genus without a non-contractible noose",
            ));
        };
        if length >= k {
            return Ok(GenusOutcome::LowerBound(certificate(
                CertificateKind::Representativity,
                k,
                id,
                &piece,
                Some(noose),
                &trace,
            )));
        }
        for &v in &noose.vertices {
            trace.push((piece.round, piece.vertex_map[v]));
        }
        for cut in cut_along_noose(emb, &noose)? {
            pending.push(Piece {
                vertex_map: cut
                    .map
                    .vertex_map
                    .iter()
                    .map(|&v| piece.vertex_map[v])
                    .collect(),
                edge_map: cut
                    .map
                    .edge_map
                    .iter()
                    .map(|&x| piece.edge_map[x])
                    .collect(),
                embedding: cut.embedding,
                round: piece.round + 1,
            });
        }
    }
    trace.sort_unstable();
    if !build {
        return Ok(GenusOutcome::Decomposition(GenusDecomposition {
            bd: BranchDecomposition::empty(),
            width: 0,
            bound,
            apex_trace: trace,
        }));
    }
    let apex: BTreeSet<VertexId> = trace.iter().map(|&(_, v)| v).collect();
    let bd = extend_over_apex(g, &apex, &parts)?;
    validate(&bd, g).map_err(|d| Error::internal(format!("assembled decomposition: {d}")))?;
    let w = width(&bd, g)?;
    Ok(GenusOutcome::Decomposition(GenusDecomposition {
        bd,
        width: w,
        bound,
        apex_trace: trace,
    }))
}

fn certificate(
    kind: CertificateKind,
    k: usize,
    id: usize,
    piece: &Piece,
    noose: Option<Noose>,
    trace: &[(usize, VertexId)],
) -> LowerBoundCertificate {
    let mut apex_trace = trace.to_vec();
    apex_trace.sort_unstable();
    LowerBoundCertificate {
        kind,
        value: k,
        witness: Witness {
            piece: id,
            embedding: piece.embedding.clone(),
            vertex_map: piece.vertex_map.clone(),
            noose,
        },
        apex_trace,
    }
}

/// Largest `b` certified as a lower bound (0 if none), and the
/// decomposition built for `b + 1`.
pub fn search_bw(e: &EmbeddedGraph) -> Result<(usize, BranchDecomposition)> {
    let certified = |k: usize| -> Result<bool> {
        Ok(matches!(approx(e, k, false)?, GenusOutcome::LowerBound(_)))
    };
    // invariant: certified(lo) (or lo = 0), !certified(hi)
    let (mut lo, mut hi) = (0usize, e.graph().n().max(1) + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if certified(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut k = lo + 1;
    loop {
        match approx(e, k, true)? {
            GenusOutcome::Decomposition(d) => return Ok((k - 1, d.bd)),
            GenusOutcome::LowerBound(_) => k += 1,
        }
    }
}
