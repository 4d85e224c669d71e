use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::poly::RealPolynomial;
use crate::error::{Error, Result};

/// num(s)/den(s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub num: RealPolynomial,
    pub den: RealPolynomial,
}

impl RationalFunction {
    pub fn new(num: RealPolynomial, den: RealPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Invalid("rational function with zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn from_poly(p: RealPolynomial) -> Self {
        Self { num: p, den: RealPolynomial::one() }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_poly(RealPolynomial::constant(c))
    }

    pub fn eval(&self, s: C64) -> C64 {
        self.num.eval_c(s) / self.den.eval_c(s)
    }

    /// F(−s)
    pub fn reflect(&self) -> Self {
        Self { num: self.num.reflect(), den: self.den.reflect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { num: self.num.scale(k), den: self.den.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// deg den − deg num (the zero function counts as +∞, reported as i64::MAX).
    pub fn relative_degree(&self) -> i64 {
        if self.num.is_zero() {
            return i64::MAX;
        }
        self.den.degree() as i64 - self.num.degree() as i64
    }

    pub fn is_proper(&self) -> bool {
        self.relative_degree() >= 0
    }

    /// lim_{|s|→∞} F(s) along any ray: 0, a finite constant, or ±∞.
    pub fn limit_at_infinity(&self) -> f64 {
        match self.relative_degree() {
            d if d > 0 => 0.0,
            0 => self.num.leading() / self.den.leading(),
            _ => f64::INFINITY * (self.num.leading() / self.den.leading()).signum(),
        }
    }

    pub fn zeros(&self) -> Result<Vec<C64>> {
        if self.num.degree() == 0 {
            return Ok(vec![]);
        }
        self.num.roots()
    }

    pub fn poles(&self) -> Result<Vec<C64>> {
        if self.den.degree() == 0 {
            return Ok(vec![]);
        }
        self.den.roots()
    }

    /// Cancel numerator/denominator roots that agree within `tol·(1+|r|)`
    /// and make the denominator monic.
    pub fn reduced(&self, tol: f64) -> Result<Self> {
        let mut zs = self.zeros()?;
        let mut ps = self.poles()?;
        let mut changed = false;
        let mut i = 0;
        while i < zs.len() {
            let z = zs[i];
            let hit = ps
                .iter()
                .enumerate()
                .filter(|(_, p)| (**p - z).norm() <= tol * (1.0 + z.norm()))
                .min_by(|a, b| (*a.1 - z).norm().partial_cmp(&(*b.1 - z).norm()).unwrap())
                .map(|(k, _)| k);
            if let Some(k) = hit {
                ps.remove(k);
                zs.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
        let dl = self.den.leading();
        if !changed {
            return Ok(Self { num: self.num.scale(1.0 / dl), den: self.den.scale(1.0 / dl) });
        }
        Ok(Self {
            num: RealPolynomial::from_roots(&zs, self.num.leading() / dl),
            den: RealPolynomial::from_roots(&ps, 1.0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> RealPolynomial {
        RealPolynomial::new(c.to_vec())
    }

    #[test]
    fn cancels_common_factor() {
        // (s+1)(s-2) / ((s+1)(s+3))
        let f = RationalFunction::new(p(&[-2.0, -1.0, 1.0]), p(&[3.0, 4.0, 1.0])).unwrap();
        let r = f.reduced(1e-8).unwrap();
        assert_eq!(r.num.degree(), 1);
        assert_eq!(r.den.degree(), 1);
        let s = C64::new(0.3, 0.8);
        assert!((r.eval(s) - f.eval(s)).norm() < 1e-12);
    }

    #[test]
    fn limits() {
        let w1 = RationalFunction::new(p(&[1.0, 0.1]), p(&[0.4, 1.0])).unwrap();
        assert!((w1.limit_at_infinity() - 0.1).abs() < 1e-15);
        assert_eq!(w1.relative_degree(), 0);
        let w2 = RationalFunction::from_poly(p(&[0.5, 0.01]));
        assert_eq!(w2.relative_degree(), -1);
        assert!(w2.limit_at_infinity().is_infinite());
        assert_eq!(RationalFunction::new(p(&[1.0]), p(&[1.0, 1.0])).unwrap().limit_at_infinity(), 0.0);
    }

    #[test]
    fn reflect_matches_eval() {
        let f = RationalFunction::new(p(&[1.0, 0.1]), p(&[0.4, 1.0])).unwrap();
        let s = C64::new(0.2, 1.5);
        assert!((f.reflect().eval(s) - f.eval(-s)).norm() < 1e-14);
    }
}
