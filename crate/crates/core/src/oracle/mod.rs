//! Brute-force ground truth for the rest of the crate: dense-grid sup-norms,
//! exhaustive sign enumeration and one-dimensional quadrature.

pub mod grid;
pub mod quadrature;
pub mod signs;

pub use grid::{grid_norm, GridNorm, GridSpec};
pub use quadrature::{integrate, integrate_log_endpoint, quadrature_l, Quadrature};
pub use signs::{exhaustive_sign_min, SignMin};
