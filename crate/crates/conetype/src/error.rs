//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid genus {0}: surface groups need genus >= 2")]
    InvalidGenus(u32),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("word is not geodesic: {0}")]
    NotGeodesic(String),
    #[error("not a half-relator subword: {0}")]
    NotHalfRelator(String),
    #[error("ball of radius {radius} would exceed the element cap {cap}")]
    ResourceCap { radius: usize, cap: usize },
    #[error("element at distance {needed} lies outside the radius-{radius} ball")]
    OutsideBall { needed: usize, radius: usize },
    #[error("genus {0} is not supported by the suffix cascade (enable the `generic-cascade` feature)")]
    UnsupportedGenus(u32),
    #[error("representative fingerprints collide up to depth {0}")]
    FingerprintCollision(usize),
    #[error("oracle classification failed for {0}: no representative fingerprint matches")]
    UnclassifiedElement(String),
    #[error("generator pair clash: ({0}, {1}) is realized by two distinct generators")]
    AmbiguousTransition(u16, u16),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("block fixture: {0}")]
    Fixture(String),
    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("matrix machinery requires a genus-2 table (got genus {0})")]
    MatrixGenus(u32),
    #[error("invalid matrix system: {0}")]
    InvalidSystem(String),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
