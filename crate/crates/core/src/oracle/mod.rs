//! Brute-force ground truth and seeded instance generators.

mod exact;
mod generate;

pub use exact::{
    enumerate_decompositions, exact_bw, exact_bw_bruteforce, OracleMode, OracleResult,
    EXHAUSTIVE_LIMIT,
};
pub use generate::{
    describe, generate, near_embedding, planted_grid, planted_vortex, random_planar, GridInstance,
    Instance, Kind, NearEmbeddingInstance, VortexInstance,
};

use crate::error::{Error, Result};
use crate::surface::{is_contractible, noose_candidates_exhaustive, EmbeddedGraph};

/// Largest radial graph (vertices plus faces) the representativity oracle
/// accepts.
pub const RADIAL_LIMIT: usize = 32;

/// Least number of vertices on a non-contractible noose, by enumerating
/// corner-graph cycles in order of length; `None` means infinite.
pub fn exhaustive_representativity(e: &EmbeddedGraph) -> Result<Option<usize>> {
    let radial = e.graph().n() + e.faces().len();
    if radial > RADIAL_LIMIT {
        return Err(Error::Mode(format!(
            "{radial} radial vertices exceed the oracle limit of {RADIAL_LIMIT}"
        )));
    }
    for len in 1..=e.graph().n() {
        let mut hit = false;
        noose_candidates_exhaustive(e, len, &mut |noose| {
            if !hit && noose.len() == len && noose.check(e).is_ok() && !is_contractible(e, noose) {
                hit = true;
            }
        });
        if hit {
            return Ok(Some(len));
        }
    }
    Ok(None)
}
