//! Polynomials, quasi-polynomials, delay-rational functions and
//! argument-principle root analysis in the right half plane.

pub mod contour;
pub mod delay;
pub mod drational;
pub mod poly;
pub mod qpoly;
pub mod rational;

pub use contour::{
    axis_min, default_rhp_box, golden_min, newton, nyquist_path, rhp_roots, stable_count, winding_count, ContourBox,
};
pub use delay::{common_denominator, Delay};
pub use drational::DelayRational;
pub use poly::RealPolynomial;
pub use qpoly::QuasiPolynomial;
pub use rational::RationalFunction;

use num_complex::Complex64 as C64;

/// Blaschke product Π (s − zᵢ)/(s + z̄ᵢ) over right-half-plane zeros.
pub fn blaschke(zeros: &[C64], s: C64) -> C64 {
    zeros.iter().map(|z| (s - z) / (s + z.conj())).product()
}

/// Monic Π (s − zᵢ) for a conjugate-closed zero list.
pub fn poly_from_zeros(zeros: &[C64]) -> RealPolynomial {
    RealPolynomial::from_roots(zeros, 1.0)
}
