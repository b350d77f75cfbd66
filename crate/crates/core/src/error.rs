//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("gauge is unbounded: point outside the span of the generators")]
    UnboundedGauge,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("norm body carries no smoothness profile (C, q)")]
    MissingSmoothness,
    #[error("norm body carries no sandwich radii (r, R)")]
    MissingSandwich,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("infeasible system: {0}")]
    Infeasible(String),
    #[error("covering does not match the instance: {0}")]
    InvalidCovering(String),
    #[error("no sparsifier candidate certified")]
    NoCertifiedSparsifier,
    #[error("singular basis: lattice must be full rank")]
    SingularBasis,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
