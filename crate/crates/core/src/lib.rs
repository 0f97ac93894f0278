//! Exact-arithmetic toolkit for verifying flag-algebra certificates that bound
//! the minimum k-clique density of graphs with independence number below `l`,
//! together with the construction-side machinery (expansions, gradients,
//! strictness, sharp lists) and an independent brute-force oracle.
//!
//! Everything outside [`constructions::optimize_weights`] is exact: graph
//! counts are integers, densities and matrix entries are arbitrary-precision
//! rationals, and no floating point enters any verification path.

pub mod certificate;
pub mod constructions;
pub mod enumerate;
pub mod exact;
pub mod flagcalc;
pub mod graph;
pub mod oracle;
pub mod sdp;

pub use certificate::Certificate;
pub use constructions::PatternGraph;
pub use enumerate::{FlagSpec, TypeSpec};
pub use exact::{PsdBlock, Rat, RatMatrix};
pub use graph::{CanonicalKey, SmallGraph};

/// Version string of the coefficient convention used by certificates and the
/// SDP emitter. Raw triple counts, no binomial normalization.
pub const CONVENTION: &str = "count-v1";

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("certificate invalid at {path}: {reason}")]
    Certificate { path: String, reason: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
