//! Spectral invariants of the scalar Laplacian on warped products `I x_f N`.
//!
//! The library builds exact WKB coefficient tables, analytically continues
//! the spectral zeta function, and assembles heat-kernel coefficients,
//! `zeta(0)`, `zeta'(0)` and functional determinants. An independent
//! shooting oracle computes eigenvalues directly for validation.

pub mod diffpoly;
pub mod error;
pub mod geometry;
pub mod heatkernel;
pub mod ode;
pub mod oracle;
pub mod special;
pub mod wkb;
pub mod zeta;

pub use error::{Error, Result};
