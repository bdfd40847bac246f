//! Special functions and quadrature primitives.
//!
//! All polynomial conventions follow the old (Condon-Shortley era) forms
//! used throughout the rest of the crate; see [`PolynomialConvention`].

mod bessel;
mod polynomials;
mod quadrature;

pub use bessel::bessel_k;
pub use polynomials::{
    assoc_laguerre_old, assoc_legendre, gamma, gegenbauer, laguerre_modern, legendre_p_at_zero,
    legendre_p_deriv_at_zero,
};
pub(crate) use polynomials::{assoc_legendre_derivs, factorial, ln_gamma};
pub use quadrature::{integrate, integrate_to_inf, QuadSpec};

/// Marker for the associated-Laguerre convention in force.
///
/// `OldLaguerre` means `L_q^p = (d/dx)^p L_q` with the unnormalized
/// Rodrigues polynomial `L_q(x) = e^x (d/dx)^q (x^q e^-x)`, so that
/// `L_q^p(x) = (-1)^p q! * Lt_{q-p}^{(p)}(x)` in terms of the modern
/// normalized polynomial `Lt`. The hydrogen normalization used here only
/// normalizes in this convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolynomialConvention {
    OldLaguerre,
}

/// Convention in force for the whole crate.
pub const LAGUERRE_CONVENTION: PolynomialConvention = PolynomialConvention::OldLaguerre;
