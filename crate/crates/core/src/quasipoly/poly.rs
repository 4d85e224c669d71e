use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trailing exact zeros are dropped; an empty list is the zero polynomial.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// `s`
    pub fn s() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    /// Monic polynomial with the given roots scaled by `lead`.
    /// Roots must be closed under conjugation; imaginary residue is discarded.
    pub fn from_roots(roots: &[C64], lead: f64) -> Self {
        let mut c = vec![C64::new(lead, 0.0)];
        for r in roots {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        Self::new(c.into_iter().map(|z| z.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_c(&self, s: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    /// p(−s)
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Drop trailing coefficients with |c| ≤ tol·max|c|.
    pub fn trimmed(&self, tol: f64) -> Self {
        let m = self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| x.abs() <= tol * m) {
            c.pop();
        }
        Self::new(c)
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Roots with multiplicity (Aberth–Ehrlich iteration, Newton polish).
    pub fn roots(&self) -> Result<Vec<C64>> {
        aberth(&self.coeffs)
    }
}

impl fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a:.6}")?,
                1 => write!(f, "{a:.6}s")?,
                _ => write!(f, "{a:.6}s^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RealPolynomial {
    type Output = RealPolynomial;
    fn add(self, rhs: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RealPolynomial {
    type Output = RealPolynomial;
    fn sub(self, rhs: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &RealPolynomial {
    type Output = RealPolynomial;
    fn mul(self, rhs: &RealPolynomial) -> RealPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RealPolynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RealPolynomial::new(c)
    }
}

impl Neg for &RealPolynomial {
    type Output = RealPolynomial;
    fn neg(self) -> RealPolynomial {
        self.scale(-1.0)
    }
}

const ABERTH_MAX_ITERS: usize = 500;

/// Roots of a real polynomial given ascending coefficients.
///
/// Zero roots are split off exactly; the rest start on a circle of radius
/// derived from the coefficient magnitudes, with an irrational angular offset
/// so no start point lands on the real axis.
pub fn aberth(coeffs: &[f64]) -> Result<Vec<C64>> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() < 2 {
        return Err(Error::Precondition("poly_roots needs a nonconstant polynomial".into()));
    }
    let zeros = c.iter().take_while(|&&x| x == 0.0).count();
    let c = &c[zeros..];
    let n = c.len() - 1;
    let mut out = vec![C64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(out);
    }
    let lead = c[n];
    let mon: Vec<C64> = c.iter().map(|&x| C64::new(x / lead, 0.0)).collect();
    let dmon: Vec<C64> = (1..=n).map(|k| mon[k] * k as f64).collect();
    let horner = |p: &[C64], z: C64| p.iter().rev().fold(C64::new(0.0, 0.0), |a, &b| a * z + b);

    // Geometric mean radius: |a0|^(1/n) for a monic polynomial; fall back to
    // the Fujiwara bound when a0 is tiny.
    let a0 = mon[0].norm();
    let fujiwara = (0..n)
        .map(|k| (mon[k].norm()).powf(1.0 / (n - k) as f64))
        .fold(0.0_f64, f64::max)
        * 2.0;
    let r0 = if a0 > 0.0 { a0.powf(1.0 / n as f64) } else { fujiwara };
    let r0 = r0.clamp(1e-3 * fujiwara.max(1e-300), fujiwara.max(1e-12));
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();

    let mut converged = vec![false; n];
    for _ in 0..ABERTH_MAX_ITERS {
        let mut all = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let p = horner(&mon, z[i]);
            let dp = horner(&dmon, z[i]);
            if p.norm() == 0.0 {
                converged[i] = true;
                continue;
            }
            let ratio = p / dp;
            let sum: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        C64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if !w.is_finite() {
                // Perturb and retry next sweep.
                let bump = C64::new(1e-6, 1e-6) * (1.0 + z[i].norm());
                z[i] += bump;
                all = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * (1.0 + z[i].norm()) {
                converged[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    // Accept stalled multiple roots by residual: the iteration converges only
    // linearly there and the step test may never trigger.
    let scale: f64 = mon.iter().map(|x| x.norm()).sum();
    for i in 0..n {
        if !converged[i] {
            let zi = z[i];
            let mag: f64 = (0..=n).map(|k| mon[k].norm() * zi.norm().powi(k as i32)).sum();
            if horner(&mon, zi).norm() > 1e-6 * mag.max(scale) {
                return Err(Error::NonConvergence { iterations: ABERTH_MAX_ITERS });
            }
        }
    }
    symmetrize(&mut z);
    out.extend(z);
    crate::sort_complex(&mut out);
    Ok(out)
}

/// Snap near-real roots to the real axis and pair the remaining ones into
/// exact conjugates.
fn symmetrize(z: &mut [C64]) {
    let n = z.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let tol = 1e-9 * (1.0 + z[i].norm());
        if z[i].im.abs() <= tol {
            z[i].im = 0.0;
            continue;
        }
        let target = z[i].conj();
        let mate = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (z[a] - target)
                    .norm()
                    .partial_cmp(&(z[b] - target).norm())
                    .unwrap()
            });
        if let Some(j) = mate {
            if (z[j] - target).norm() <= 1e-6 * (1.0 + z[i].norm()) {
                used[j] = true;
                let m = (z[i] + z[j].conj()) * 0.5;
                z[i] = m;
                z[j] = m.conj();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn arithmetic() {
        let p = RealPolynomial::new(vec![1.0, 2.0]);
        let q = RealPolynomial::new(vec![-1.0, 0.0, 3.0]);
        assert_eq!((&p * &q).coeffs(), &[-1.0, -2.0, 3.0, 6.0]);
        assert_eq!((&p + &q).coeffs(), &[0.0, 2.0, 3.0]);
        assert_eq!((&p - &p).coeffs(), &[] as &[f64]);
        assert_eq!(q.reflect().coeffs(), &[-1.0, 0.0, 3.0]);
        assert_eq!(p.reflect().coeffs(), &[1.0, -2.0]);
        assert_eq!(q.derivative().coeffs(), &[0.0, 6.0]);
        assert_eq!(p.pow(2).coeffs(), &[1.0, 4.0, 4.0]);
    }

    #[test]
    fn roots_of_s2_minus_1() {
        let r = RealPolynomial::new(vec![-1.0, 0.0, 1.0]).roots().unwrap();
        assert_abs_diff_eq!(r[0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn roots_with_zero_and_multiple() {
        // s (s+1)^3
        let p = RealPolynomial::new(vec![0.0, 1.0, 3.0, 3.0, 1.0]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r[3], C64::new(0.0, 0.0));
        for z in &r[..3] {
            assert!((z - C64::new(-1.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn quadratic_formula_oracle() {
        // s² + 0.93 s + 3.79
        let p = RealPolynomial::new(vec![3.79, 0.93, 1.0]);
        let r = p.roots().unwrap();
        let disc = (0.93f64 * 0.93 - 4.0 * 3.79).abs().sqrt() / 2.0;
        assert_abs_diff_eq!(r[0].re, -0.465, epsilon = 1e-12);
        assert_abs_diff_eq!(r[0].im, -disc, epsilon = 1e-12);
        assert_eq!(r[1], r[0].conj());
    }

    #[test]
    fn from_roots_round_trip() {
        let roots = [C64::new(-1.0, 2.0), C64::new(-1.0, -2.0), C64::new(3.0, 0.0)];
        let p = RealPolynomial::from_roots(&roots, 2.0);
        let back = p.roots().unwrap();
        assert_eq!(back.len(), 3);
        for r in roots {
            assert!(back.iter().any(|b| (b - r).norm() < 1e-10));
        }
        assert_abs_diff_eq!(p.leading(), 2.0);
    }

    #[test]
    fn constant_is_rejected() {
        assert!(RealPolynomial::constant(3.0).roots().is_err());
    }
}
