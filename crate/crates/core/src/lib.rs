//! Approximate closest-vector solvers driven by `(2,eps)`-coverings of norm
//! balls and by lattice sparsification, together with the covering
//! constructions, modulus-of-smoothness machinery and brute-force oracles
//! needed to check every claim at desk scale (dimension <= ~6).
//!
//! Lattice bases and targets are exact (big integers / rationals); gauge
//! values are `f64` with a single global tolerance [`eta`].

pub mod boost;
pub mod covering;
pub mod error;
pub mod experiment;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod norms;
pub mod rng;
pub mod simplex;
pub mod sparsify;

pub use error::{Error, Result};

/// Scalar type for all analytic (gauge, modulus, covering) computations.
pub type Real = f64;
/// Exact integer type for lattice bases and coefficient vectors.
pub type Int = num_bigint::BigInt;
/// Exact rational type for targets and exact linear solves.
pub type Rat = num_rational::BigRational;

use std::sync::OnceLock;

static TOL: OnceLock<Real> = OnceLock::new();

/// Global numeric tolerance eta. Defaults to `1e-9`; the `LATCOVER_TOL`
/// environment variable overrides it (read once, at first use).
pub fn eta() -> Real {
    *TOL.get_or_init(|| {
        std::env::var("LATCOVER_TOL")
            .ok()
            .and_then(|s| s.parse::<Real>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(1e-9)
    })
}
