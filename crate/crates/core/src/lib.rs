//! Linear polarization constants of finite-dimensional `ℓ_p` spaces.
//!
//! The crate computes closed-form Hilbert-space constants, Monte Carlo
//! estimates of the sphere integrals that bound `c(ℓ_p^d)` from both sides,
//! certified sup-norms of random `±1` functional products on `ℓ_∞^d(ℂ)`, and
//! brute-force oracles that check all of the above at small scale.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod hilbert;
pub mod oracle;
pub mod product_poly;
pub mod spaces;
pub mod sphere_integrals;
pub mod torus;

pub use error::{Error, Result};
