//! Design and certification of stable suboptimal H∞ controllers for SISO
//! time-delay plants.
//!
//! The crate is organised bottom-up:
//!
//! * [`quasipoly`] – polynomials, quasi-polynomials, delay-rational functions
//!   and argument-principle root counting in the right half plane.
//! * [`plantmodel`] – plant ingestion, F-/I-system classification and the
//!   inner–outer factorization `P = m_n N_o / m_d`.
//! * [`synthesis`] – Skew-Toeplitz mixed-sensitivity synthesis (`E`, `F`,
//!   interpolation polynomials, `γ_opt`, controller assembly).
//! * [`stabinf`] – search for a stable controller when the central controller
//!   has infinitely many unstable poles.
//! * [`stabfin`] – Nevanlinna–Pick based search when the controller has
//!   finitely many unstable poles.
//! * [`analysis`] – closed-loop verification and frequency responses.

pub mod analysis;
pub mod error;
pub mod plantmodel;
pub mod quasipoly;
pub mod stabfin;
pub mod stabinf;
pub mod synthesis;
pub mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use tolerance::Tolerances;

/// Logarithmically spaced grid of `n` points on `[lo, hi]`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Linearly spaced grid of `n` points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Sort complex numbers lexicographically by (re, im).
pub(crate) fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}
