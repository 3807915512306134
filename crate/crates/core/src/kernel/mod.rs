//! Numerical primitives: adaptive quadrature, complex Gamma/digamma and
//! vertical-line contour integrals.

pub mod contour;
pub mod quadrature;
pub mod special;

pub use contour::{vertical_line_integral, LineIntegral};
pub use quadrature::{
    integrate_adaptive, integrate_breakpoints, integrate_from_neg_infinity, integrate_real,
    integrate_to_infinity, QuadratureConfig,
};
pub use special::{complex_gamma_digamma, digamma, gamma, ln_gamma, EULER_GAMMA};
