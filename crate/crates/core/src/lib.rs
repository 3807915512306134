//! Local terms of the Weil explicit formula over the rationals.
//!
//! The crate computes every place's contribution `(G_ν ∗ F_ν)(1)`, where
//! `G_ν` is the Fourier transform of `-log|x|_ν`, together with the local
//! Gamma factors, the conductor operator and the p-adic action functional,
//! and checks the global identity against tables of zeta zeros.

pub mod characters;
pub mod error;
pub mod explicit_formula;
pub mod gamma_factors;
pub mod kernel;
pub mod log_fourier;
pub mod padic;
pub mod test_functions;
pub mod weil_local;
pub mod zabrodin;

pub use error::{Error, Result};
pub use num_complex::Complex64;
