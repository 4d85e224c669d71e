use num_complex::Complex64 as C64;

use super::delay::Delay;
use super::poly::RealPolynomial;
use super::qpoly::QuasiPolynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

/// Σ rᵢ(s)e^{−hᵢ s} / d(s): delay-rational function with one shared
/// denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayRational {
    num: QuasiPolynomial,
    den: RealPolynomial,
}

impl DelayRational {
    pub fn new(num: QuasiPolynomial, den: RealPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Invalid("delay-rational with zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn numerator(&self) -> &QuasiPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &RealPolynomial {
        &self.den
    }

    pub fn delays(&self) -> Vec<Delay> {
        self.num.delays().collect()
    }

    /// Term i as a rational function Rᵢ = rᵢ/d.
    pub fn term(&self, i: usize) -> RationalFunction {
        RationalFunction { num: self.num.terms()[i].1.clone(), den: self.den.clone() }
    }

    pub fn eval(&self, s: C64) -> C64 {
        self.num.eval(s) / self.den.eval_c(s)
    }

    pub fn first_delay(&self) -> Delay {
        self.num.terms()[0].0
    }

    pub fn last_delay(&self) -> Delay {
        self.num.terms().last().unwrap().0
    }

    /// e^{h s}·R for h no larger than the first delay.
    pub fn advance(&self, h: Delay) -> Result<Self> {
        if h > self.first_delay() {
            return Err(Error::Precondition(format!("cannot advance by {h} past first delay")));
        }
        let terms = self.num.terms().iter().map(|(d, p)| (d.sub(h), p.clone())).collect();
        Self::new(QuasiPolynomial::new(terms)?, self.den.clone())
    }

    /// R̄(s) = e^{−hₙ s} R(−s) M_C(s), M_C = (−1)^{deg d} d(−s)/d(s).
    ///
    /// The result keeps the denominator d(s) and has delays {hₙ − hᵢ}.
    pub fn conjugate(&self) -> Self {
        let hn = self.last_delay();
        let sign = if self.den.degree() % 2 == 1 { -1.0 } else { 1.0 };
        let mut terms: Vec<(Delay, RealPolynomial)> = self
            .num
            .terms()
            .iter()
            .map(|(h, p)| (hn.sub(*h), p.reflect().scale(sign)))
            .collect();
        terms.reverse();
        Self {
            num: QuasiPolynomial::new(terms).expect("reflected delays stay ordered"),
            den: self.den.clone(),
        }
    }
}
