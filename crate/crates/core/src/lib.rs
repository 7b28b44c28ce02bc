//! Branch-decompositions of graphs embedded on surfaces.

pub mod error;
pub mod fixtures;
pub mod graph;
pub mod surface;

pub use error::{Diagnostic, Error, Result};
pub mod branchdecomp;
pub mod genusreduce;
pub mod gridminer;
pub mod oracle;
pub mod pipeline;
pub mod ratcatcher;
pub mod vortex;
