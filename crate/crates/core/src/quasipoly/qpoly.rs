use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::delay::Delay;
use super::poly::RealPolynomial;
use crate::error::{Error, Result};

/// Σ pᵢ(s)·e^{−hᵢ s} with strictly increasing delays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Delay, RealPolynomial)>", into = "Vec<(Delay, RealPolynomial)>")]
pub struct QuasiPolynomial {
    terms: Vec<(Delay, RealPolynomial)>,
}

impl TryFrom<Vec<(Delay, RealPolynomial)>> for QuasiPolynomial {
    type Error = Error;
    fn try_from(v: Vec<(Delay, RealPolynomial)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<QuasiPolynomial> for Vec<(Delay, RealPolynomial)> {
    fn from(q: QuasiPolynomial) -> Self {
        q.terms
    }
}

impl QuasiPolynomial {
    pub fn new(terms: Vec<(Delay, RealPolynomial)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Invalid("quasi-polynomial needs at least one term".into()));
        }
        for w in terms.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Invalid(format!(
                    "delays must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self { terms })
    }

    /// Single undelayed polynomial.
    pub fn from_poly(p: RealPolynomial) -> Self {
        Self { terms: vec![(Delay::ZERO, p)] }
    }

    pub fn terms(&self) -> &[(Delay, RealPolynomial)] {
        &self.terms
    }

    pub fn delays(&self) -> impl Iterator<Item = Delay> + '_ {
        self.terms.iter().map(|(d, _)| *d)
    }

    pub fn eval(&self, s: C64) -> C64 {
        self.terms
            .iter()
            .map(|(h, p)| {
                let e = if h.is_zero() { C64::new(1.0, 0.0) } else { (-s * h.to_f64()).exp() };
                p.eval_c(s) * e
            })
            .sum()
    }

    /// d/ds, exact: Σ (pᵢ' − hᵢpᵢ) e^{−hᵢ s}.
    pub fn eval_deriv(&self, s: C64) -> C64 {
        self.terms
            .iter()
            .map(|(h, p)| {
                let hf = h.to_f64();
                let e = (-s * hf).exp();
                (p.derivative().eval_c(s) - p.eval_c(s) * hf) * e
            })
            .sum()
    }

    /// Largest polynomial degree across terms.
    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.degree()).max().unwrap_or(0)
    }

    /// Cauchy-type magnitude bound on RHP zeros, relative to the leading
    /// coefficient of the highest-degree first-found term.
    pub fn zero_scale(&self) -> f64 {
        let d = self.max_degree();
        let lead = self
            .terms
            .iter()
            .find(|(_, p)| p.degree() == d && !p.is_zero())
            .map(|(_, p)| p.leading().abs())
            .unwrap_or(1.0);
        let mut total = 0.0;
        let mut skipped = false;
        for (_, p) in &self.terms {
            for (k, c) in p.coeffs().iter().enumerate() {
                if !skipped && k == d && c.abs() == lead {
                    skipped = true;
                    continue;
                }
                total += c.abs();
            }
        }
        total / lead
    }

    /// Smallest positive delay, if any.
    pub fn min_positive_delay(&self) -> Option<f64> {
        self.terms
            .iter()
            .map(|(h, _)| h.to_f64())
            .filter(|&h| h > 0.0)
            .fold(None, |m: Option<f64>, h| Some(m.map_or(h, |m| m.min(h))))
    }

    /// Smallest positive gap between delays (sets the chain period).
    pub fn min_delay_gap(&self) -> Option<f64> {
        let mut g: Option<f64> = None;
        for w in self.terms.windows(2) {
            let d = w[1].0.to_f64() - w[0].0.to_f64();
            g = Some(g.map_or(d, |x| x.min(d)));
        }
        g
    }

    /// Multiply every term by the polynomial `m`.
    pub fn mul_poly(&self, m: &RealPolynomial) -> Self {
        Self { terms: self.terms.iter().map(|(h, p)| (*h, p * m)).collect() }
    }
}
