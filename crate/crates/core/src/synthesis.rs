//! Skew-Toeplitz mixed-sensitivity synthesis: `E`, the spectral factor
//! `G`, `F = G·Π(s−η)/(s+η)`, the interpolation system for `(L₁, L₂)`,
//! the optimal level search and controller assembly.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plantmodel::FactoredPlant;
use crate::quasipoly::{RationalFunction, RealPolynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub w1: RationalFunction,
    pub w2: RationalFunction,
}

impl Weights {
    pub fn new(w1: RationalFunction, w2: RationalFunction) -> Result<Self> {
        if !w1.is_proper() {
            return Err(Error::Invalid("W1 must be proper".into()));
        }
        if w1.num.degree() == 0 && w1.den.degree() == 0 {
            return Err(Error::Invalid("W1 must be non-constant".into()));
        }
        for p in w1.poles()? {
            if p.re >= 0.0 {
                return Err(Error::Invalid(format!("W1 has a pole at {p} outside the open LHP")));
            }
        }
        if w2.is_zero() {
            return Err(Error::Invalid("W2 must be nonzero".into()));
        }
        Ok(Self { w1, w2 })
    }

    /// Both weights scaled by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { w1: self.w1.scale(c), w2: self.w2.scale(c) }
    }

    /// sup |W1(jω)| on a dense grid (plus the DC and HF limits).
    pub fn w1_peak(&self) -> f64 {
        let mut m = self.w1.eval(C64::new(0.0, 0.0)).norm().max(self.w1.limit_at_infinity().abs());
        for w in crate::logspace(1e-4, 1e5, 2000) {
            m = m.max(self.w1.eval(C64::new(0.0, w)).norm());
        }
        m
    }
}

/// Data that depends only on the level γ (or ρ) and the weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaData {
    pub level: f64,
    pub e: RationalFunction,
    pub g: RationalFunction,
    pub f: RationalFunction,
    /// One representative per conjugate/mirror class of E's closed-RHP
    /// zeros: off-axis pairs appear twice (β, β̄), axis pairs once (Im > 0).
    pub beta: Vec<C64>,
    /// Imaginary parts (> 0) of E's imaginary-axis zeros.
    pub axis_beta: Vec<f64>,
    pub eta: Vec<C64>,
    pub n1: usize,
    /// Numerator and denominator (even polynomials) of G(s)G(−s).
    pub density: RationalFunction,
}

impl GammaData {
    pub fn new(level: f64, w: &Weights) -> Result<Self> {
        let (e, beta) = compute_e(level, &w.w1)?;
        let axis_beta = beta.iter().filter(|b| b.re == 0.0).map(|b| b.im).collect();
        let (g, density) = spectral_factor_with_density(level, w, &e)?;
        let eta: Vec<C64> = w.w1.poles()?.into_iter().map(|p| -p).collect();
        let bl = RationalFunction {
            num: RealPolynomial::from_roots(&eta, 1.0),
            den: RealPolynomial::from_roots(&eta.iter().map(|x| -x).collect::<Vec<_>>(), 1.0),
        };
        let mut g = g;
        let mut f = g.mul(&bl).reduced(1e-7)?;
        if f.eval(C64::new(0.0, 0.0)).re < 0.0 {
            f = f.scale(-1.0);
            g = g.scale(-1.0);
        }
        let n1 = beta.len();
        Ok(Self { level, e, g, f, beta, axis_beta, eta, n1, density })
    }

    /// |F(jω)| as ω → ∞.
    pub fn f_inf(&self) -> f64 {
        self.f.limit_at_infinity().abs()
    }
}

/// E_γ = W1(−s)W1(s)/γ² − 1 and its closed-RHP zeros.
pub fn compute_e(level: f64, w1: &RationalFunction) -> Result<(RationalFunction, Vec<C64>)> {
    if level <= 0.0 {
        return Err(Error::Precondition("level must be positive".into()));
    }
    let g2 = level * level;
    let nn = &w1.num * &w1.num.reflect();
    let dd = &w1.den * &w1.den.reflect();
    let mut e = RationalFunction { num: &nn - &dd.scale(g2), den: dd.scale(g2) };
    if e.num.degree() > 0 && e.den.degree() > 0 {
        let r = e.reduced(1e-9)?;
        if r.den.degree() < e.den.degree() {
            e = r;
        }
    }
    if e.num.is_zero() {
        return Err(Error::Precondition(format!("E vanishes identically at level {level}")));
    }
    let mut beta = Vec::new();
    if e.num.degree() > 0 {
        for z in even_roots_rhp(&e.num)? {
            if z.re == 0.0 {
                if z.im == 0.0 {
                    return Err(Error::AxisZero { at: z });
                }
                beta.push(C64::new(0.0, z.im.abs()));
            } else {
                beta.push(z);
            }
        }
    }
    check_distinct(&beta)?;
    crate::sort_complex(&mut beta);
    Ok((e, beta))
}

fn check_distinct(z: &[C64]) -> Result<()> {
    for (i, a) in z.iter().enumerate() {
        if z[i + 1..].iter().any(|b| (a - b).norm() < 1e-7 * (1.0 + a.norm())) {
            return Err(Error::UnsupportedMultiplicity { at: *a });
        }
    }
    Ok(())
}

/// Even polynomial p(s) = q(s²) → q.
fn even_part(p: &RealPolynomial) -> Result<RealPolynomial> {
    let m = p.max_abs_coeff();
    let c = p.coeffs();
    if c.iter().skip(1).step_by(2).any(|x| x.abs() > 1e-10 * m) {
        return Err(Error::ImproperDensity("polynomial is not even in s".into()));
    }
    Ok(RealPolynomial::new(c.iter().step_by(2).copied().collect()))
}

/// Roots with Re ≥ 0 of an even polynomial, one per ± pair; imaginary-axis
/// roots come out with Re exactly 0.
fn even_roots_rhp(p: &RealPolynomial) -> Result<Vec<C64>> {
    let q = even_part(p)?;
    if q.degree() == 0 {
        return Ok(vec![]);
    }
    Ok(q.roots()?
        .into_iter()
        .map(|x| {
            if x.im == 0.0 && x.re <= 0.0 {
                C64::new(0.0, (-x.re).sqrt())
            } else {
                x.sqrt()
            }
        })
        .collect())
}

/// G with G(s)G(−s) = (1 − (W2W2~/γ² − 1)E)⁻¹, G outer.
pub fn spectral_factor(level: f64, w: &Weights) -> Result<RationalFunction> {
    let (e, _) = compute_e(level, &w.w1)?;
    Ok(spectral_factor_with_density(level, w, &e)?.0)
}

fn spectral_factor_with_density(
    level: f64,
    w: &Weights,
    e: &RationalFunction,
) -> Result<(RationalFunction, RationalFunction)> {
    let g2 = level * level;
    let n2 = &w.w2.num * &w.w2.num.reflect();
    let d2 = &w.w2.den * &w.w2.den.reflect();
    // G G~ = γ² d2 dE / (γ² d2 dE − (n2 − γ² d2) nE)
    let top = (&d2 * &e.den).scale(g2);
    let bottom = &top - &(&(&n2 - &d2.scale(g2)) * &e.num);
    if bottom.is_zero() {
        return Err(Error::ImproperDensity("density numerator vanishes".into()));
    }
    let density = RationalFunction { num: top.clone(), den: bottom.clone() };
    let half = |p: &RealPolynomial| -> Result<(RealPolynomial, f64)> {
        if p.degree() == 0 {
            return Ok((RealPolynomial::one(), p.leading()));
        }
        let mut lhp = Vec::new();
        for z in even_roots_rhp(p)? {
            if z.re == 0.0 || z.re.abs() <= 1e-12 * (1.0 + z.norm()) {
                return Err(Error::AxisRoot { at: z });
            }
            lhp.push(-z);
        }
        let m = lhp.len();
        let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
        Ok((RealPolynomial::from_roots(&lhp, 1.0), p.leading() * sign))
    };
    let (an, cn) = half(&top)?;
    let (ad, cd) = half(&bottom)?;
    let k2 = cn / cd;
    if !(k2 > 0.0) {
        return Err(Error::ImproperDensity(format!("negative spectral gain {k2:e}")));
    }
    let g = RationalFunction { num: an.scale(k2.sqrt()), den: ad }.reduced(1e-9)?;
    Ok((g, density))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LMode {
    Optimal,
    Suboptimal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerL {
    pub l1: RealPolynomial,
    pub l2: RealPolynomial,
    pub degree_bound: usize,
    pub a: f64,
    pub mode: LMode,
}

impl ControllerL {
    /// lim L2/L1 at infinity.
    pub fn k(&self) -> f64 {
        let n = self.degree_bound;
        let l1 = self.l1.coeff(n);
        if l1 == 0.0 {
            return f64::INFINITY;
        }
        self.l2.coeff(n) / l1
    }
}

/// m_n(s)F(s)
fn mnf(fp: &FactoredPlant, gd: &GammaData, s: C64) -> C64 {
    fp.m_n(s) * gd.f.eval(s)
}

fn powers(s: C64, n: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(n);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..n {
        v.push(p);
        p *= s;
    }
    v
}

/// Interpolation conditions as complex rows over [L1 coeffs, L2 coeffs].
///
/// Returns (row, is_pair_member) where rows for points with Im > 0 stand for
/// a conjugate pair; axis points contribute only the first condition since
/// the second is its conjugate there.
fn condition_rows(fp: &FactoredPlant, gd: &GammaData, deg: usize) -> Vec<(Vec<C64>, bool)> {
    let n = deg + 1;
    let mut rows = Vec::new();
    let pts = gd
        .beta
        .iter()
        .map(|b| (*b, b.re == 0.0))
        .chain(fp.alpha.iter().map(|a| (*a, false)));
    for (p, on_axis) in pts {
        if p.im < 0.0 {
            continue;
        }
        let complex = p.im > 0.0;
        let q = mnf(fp, gd, p);
        let pp = powers(p, n);
        let pm = powers(-p, n);
        let mut c1: Vec<C64> = pp.clone();
        c1.extend(pp.iter().map(|x| q * x));
        rows.push((c1, complex));
        if !on_axis {
            let mut c2: Vec<C64> = pm.iter().map(|x| q * x).collect();
            c2.extend(pm.iter().copied());
            rows.push((c2, complex));
        }
    }
    rows
}

fn push_real_rows(out: &mut Vec<Vec<f64>>, row: &[C64], complex: bool) {
    let mut add = |r: Vec<f64>| {
        let m = r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        out.push(if m > 0.0 { r.iter().map(|x| x / m).collect() } else { r });
    };
    add(row.iter().map(|z| z.re).collect());
    if complex {
        add(row.iter().map(|z| z.im).collect());
    }
}

/// Real interpolation matrix, rows normalized to unit max-norm. `extra`
/// appends the suboptimal condition at s = −a.
pub fn interpolation_matrix(
    fp: &FactoredPlant,
    gd: &GammaData,
    deg: usize,
    extra: Option<f64>,
) -> DMatrix<f64> {
    let mut rows = Vec::new();
    for (r, c) in condition_rows(fp, gd, deg) {
        push_real_rows(&mut rows, &r, c);
    }
    if let Some(a) = extra {
        let sa = C64::new(a, 0.0);
        let qa = (gd.e.eval(sa) + 1.0) * gd.f.eval(sa) * fp.m_n(sa);
        let pm = powers(-sa, deg + 1);
        let mut r: Vec<C64> = pm.iter().map(|x| qa * x).collect();
        r.extend(pm.iter().copied());
        push_real_rows(&mut rows, &r, false);
    }
    let ncol = 2 * (deg + 1);
    DMatrix::from_fn(rows.len(), ncol, |i, j| rows[i][j])
}

/// Relative residuals |L1(p)+qL2(p)|/(|L1(p)|+|qL2(p)|) of all conditions.
pub fn interpolation_residuals(fp: &FactoredPlant, gd: &GammaData, l: &ControllerL) -> Vec<f64> {
    let mut out = Vec::new();
    let pts = gd.beta.iter().map(|b| (*b, b.re == 0.0)).chain(fp.alpha.iter().map(|a| (*a, false)));
    for (p, on_axis) in pts {
        let q = mnf(fp, gd, p);
        let (a1, a2) = (l.l1.eval_c(p), l.l2.eval_c(p));
        out.push((a1 + q * a2).norm() / (a1.norm() + (q * a2).norm()));
        if !on_axis {
            let (b1, b2) = (l.l1.eval_c(-p), l.l2.eval_c(-p));
            out.push((b2 + q * b1).norm() / (b2.norm() + (q * b1).norm()));
        }
    }
    if l.mode == LMode::Suboptimal {
        let sa = C64::new(l.a, 0.0);
        let qa = (gd.e.eval(sa) + 1.0) * gd.f.eval(sa) * fp.m_n(sa);
        let (b1, b2) = (l.l1.eval(-l.a), l.l2.eval(-l.a));
        out.push((b2 + qa * b1).norm() / (b2.abs() + (qa * b1).norm()));
    }
    out
}

fn optimal_degree(fp: &FactoredPlant, gd: &GammaData) -> Result<usize> {
    let n = gd.n1 + fp.ell();
    if n == 0 {
        return Err(Error::Precondition("no interpolation points (n1 + ell = 0)".into()));
    }
    Ok(n - 1)
}

/// Determinant of the square optimal-case interpolation matrix at `level`;
/// `None` where E/G cannot be formed.
pub fn interpolation_det(fp: &FactoredPlant, w: &Weights, level: f64) -> Option<f64> {
    let gd = GammaData::new(level, w).ok()?;
    let deg = optimal_degree(fp, &gd).ok()?;
    let m = interpolation_matrix(fp, &gd, deg, None);
    if m.nrows() != m.ncols() {
        return None;
    }
    let d = m.determinant();
    d.is_finite().then_some(d)
}

/// Default γ bracket: from 0.02 up to just below sup|W1|.
pub fn default_bracket(w: &Weights) -> (f64, f64) {
    (0.02, 0.999 * w.w1_peak())
}

/// Largest level in the bracket where the interpolation determinant
/// changes sign (a genuine root, not a jump).
pub fn gamma_opt(fp: &FactoredPlant, w: &Weights, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Precondition(format!("bad bracket [{lo}, {hi}]")));
    }
    let grid = crate::logspace(lo, hi, 200);
    let dets: Vec<Option<f64>> = grid.par_iter().map(|&g| interpolation_det(fp, w, g)).collect();
    for i in (0..grid.len() - 1).rev() {
        let (Some(d0), Some(d1)) = (dets[i], dets[i + 1]) else { continue };
        if d0.signum() == d1.signum() || d0 == 0.0 {
            continue;
        }
        let (mut a, mut b, mut da) = (grid[i], grid[i + 1], d0);
        let mut ok = true;
        while (b - a) > 1e-5 * b {
            let m = 0.5 * (a + b);
            match interpolation_det(fp, w, m) {
                Some(dm) if dm.signum() == da.signum() => {
                    a = m;
                    da = dm;
                }
                Some(_) => b = m,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && is_singular_at(fp, w, 0.5 * (a + b)) {
            return Ok(0.5 * (a + b));
        }
    }
    Err(Error::NoCrossing { lo, hi })
}

/// Accept a sign change only if the matrix is numerically singular there.
fn is_singular_at(fp: &FactoredPlant, w: &Weights, level: f64) -> bool {
    let Ok(gd) = GammaData::new(level, w) else { return false };
    let Ok(deg) = optimal_degree(fp, &gd) else { return false };
    let m = interpolation_matrix(fp, &gd, deg, None);
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    min <= 1e-3 * max
}

/// Null vector of a (possibly wide) matrix with the two smallest singular
/// values, sorted ascending.
fn null_vector(m: &DMatrix<f64>) -> (Vec<f64>, f64, f64) {
    let n = m.ncols();
    let mut sq = DMatrix::zeros(n.max(m.nrows()), n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap());
    let v = v_t.row(idx[0]).iter().copied().collect();
    let s0 = svd.singular_values[idx[0]];
    let s1 = svd.singular_values.get(idx.get(1).copied().unwrap_or(idx[0])).copied().unwrap_or(0.0);
    let smax = svd.singular_values.max();
    (v, s0 / smax, s1 / smax)
}

/// Default extra-condition point for suboptimal (L1, L2).
pub const DEFAULT_EXTRA_POINT: f64 = 2.0;

pub fn solve_l(fp: &FactoredPlant, gd: &GammaData, mode: LMode, a: f64) -> Result<ControllerL> {
    let base = optimal_degree(fp, gd)?;
    let (deg, extra) = match mode {
        LMode::Optimal => (base, None),
        LMode::Suboptimal => {
            if !(a > 0.0) {
                return Err(Error::Precondition("extra-condition point must be positive".into()));
            }
            (base + 1, Some(a))
        }
    };
    let m = interpolation_matrix(fp, gd, deg, extra);
    let (v, s0, s1) = null_vector(&m);
    // Optimal case: the matrix is singular only up to the accuracy of the
    // located level, so accept a small but clearly separated σ_min.
    let sing = match mode {
        LMode::Optimal => s0 <= 1e-3 && s1 > 10.0 * s0,
        LMode::Suboptimal => s0 <= 1e-9 && s1 > 1e-8,
    };
    if !sing {
        return Err(Error::DegenerateNullspace { smallest: s0, second: s1 });
    }
    let n = deg + 1;
    let (mut l1, mut l2): (Vec<f64>, Vec<f64>) = (v[..n].to_vec(), v[n..].to_vec());
    let scale = match mode {
        LMode::Optimal => {
            let (i, _) = v.iter().enumerate().fold((0, 0.0f64), |b, (i, x)| if x.abs() > b.1 { (i, x.abs()) } else { b });
            v[i]
        }
        LMode::Suboptimal => l1[deg],
    };
    if scale == 0.0 {
        return Err(Error::DegenerateNullspace { smallest: s0, second: s1 });
    }
    l1.iter_mut().chain(l2.iter_mut()).for_each(|x| *x /= scale);
    let l = ControllerL {
        l1: RealPolynomial::new(l1),
        l2: RealPolynomial::new(l2),
        degree_bound: deg,
        a,
        mode,
    };
    if mode == LMode::Suboptimal && l.l1.eval(-a).abs() <= 1e-10 * l.l1.max_abs_coeff() {
        return Err(Error::L1AtMinusAZero { a });
    }
    Ok(l)
}

/// U(s) = u∞ (u_z + s)/(u_p + s); a constant is encoded with u_z = u_p.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderU {
    pub u_inf: f64,
    pub u_z: f64,
    pub u_p: f64,
}

impl FirstOrderU {
    pub fn constant(u: f64) -> Self {
        Self { u_inf: u, u_z: 1.0, u_p: 1.0 }
    }

    pub fn new(u_inf: f64, u_z: f64, u_p: f64) -> Result<Self> {
        let u = Self { u_inf, u_z, u_p };
        if !u.is_valid() {
            return Err(Error::Invalid(format!("U = {u:?} violates ‖U‖∞ ≤ 1")));
        }
        Ok(u)
    }

    pub fn is_constant(&self) -> bool {
        self.u_z == self.u_p
    }

    pub fn is_valid(&self) -> bool {
        if self.is_constant() {
            return self.u_inf.abs() <= 1.0;
        }
        self.u_inf.abs() <= 1.0 && self.u_p > 0.0 && self.u_p >= (self.u_inf * self.u_z).abs()
    }

    pub fn eval(&self, s: C64) -> C64 {
        if self.is_constant() {
            return C64::new(self.u_inf, 0.0);
        }
        self.u_inf * (self.u_z + s) / (self.u_p + s)
    }

    /// (numerator, denominator) polynomials.
    pub fn polys(&self) -> (RealPolynomial, RealPolynomial) {
        if self.is_constant() {
            return (RealPolynomial::constant(self.u_inf), RealPolynomial::one());
        }
        (
            RealPolynomial::new(vec![self.u_inf * self.u_z, self.u_inf]),
            RealPolynomial::new(vec![self.u_p, 1.0]),
        )
    }

    /// ‖U‖∞ (first-order magnitude is monotone between DC and ∞).
    pub fn hinf(&self) -> f64 {
        if self.is_constant() {
            return self.u_inf.abs();
        }
        self.u_inf.abs() * 1f64.max((self.u_z / self.u_p).abs())
    }
}

/// Free parameter of the suboptimal family.
#[derive(Clone)]
pub enum UParam {
    First(FirstOrderU),
    /// Arbitrary stable evaluator with ‖U‖∞ ≤ 1 (the finite-pole route).
    Func(std::sync::Arc<dyn Fn(C64) -> C64 + Send + Sync>),
}

impl std::fmt::Debug for UParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UParam::First(u) => write!(f, "First({u:?})"),
            UParam::Func(_) => write!(f, "Func(..)"),
        }
    }
}

impl UParam {
    pub fn zero() -> Self {
        UParam::First(FirstOrderU::constant(0.0))
    }

    pub fn eval(&self, s: C64) -> C64 {
        match self {
            UParam::First(u) => u.eval(s),
            UParam::Func(f) => f(s),
        }
    }
}

/// Suboptimal (or optimal) controller evaluator.
#[derive(Clone, Debug)]
pub struct Controller {
    pub fp: FactoredPlant,
    pub gd: GammaData,
    pub l: ControllerL,
    pub u: UParam,
}

impl Controller {
    pub fn l_u(&self, s: C64) -> C64 {
        let u = self.u.eval(s);
        let (l1, l2) = (&self.l.l1, &self.l.l2);
        (l2.eval_c(s) + l1.eval_c(-s) * u) / (l1.eval_c(s) + l2.eval_c(-s) * u)
    }

    /// X = m_n F L_U; the controller is C = E m_d N_o⁻¹ F L_U/(1+X).
    pub fn x(&self, s: C64) -> C64 {
        self.fp.m_n(s) * self.gd.f.eval(s) * self.l_u(s)
    }

    pub fn eval(&self, s: C64) -> C64 {
        let flu = self.gd.f.eval(s) * self.l_u(s);
        let x = self.fp.m_n(s) * flu;
        self.gd.e.eval(s) * self.fp.m_d(s) / self.fp.n_o(s) * flu / (1.0 + x)
    }

    /// P(s)C(s) = E X/(1 + X): the plant/controller product without N_o.
    pub fn loop_gain(&self, s: C64) -> C64 {
        let x = self.x(s);
        self.gd.e.eval(s) * x / (1.0 + x)
    }

    /// (L_1U numerator, L_2U numerator, common denominator) for
    /// first-order U; L_1U = L1 + L2(−s)U, L_2U = L2 + L1(−s)U.
    pub fn l1u_l2u(&self) -> Option<(RealPolynomial, RealPolynomial, RealPolynomial)> {
        let UParam::First(u) = &self.u else { return None };
        Some(l1u_l2u(&self.l, u))
    }
}

pub fn l1u_l2u(l: &ControllerL, u: &FirstOrderU) -> (RealPolynomial, RealPolynomial, RealPolynomial) {
    let (un, ud) = u.polys();
    let l1u = &(&l.l1 * &ud) + &(&l.l2.reflect() * &un);
    let l2u = &(&l.l2 * &ud) + &(&l.l1.reflect() * &un);
    (l1u, l2u, ud)
}

pub fn assemble(fp: &FactoredPlant, gd: &GammaData, l: &ControllerL, u: UParam) -> Controller {
    Controller { fp: fp.clone(), gd: gd.clone(), l: l.clone(), u }
}

/// lim |F L_U| at infinity for first-order U.
pub fn hf_limit(gd: &GammaData, l: &ControllerL, u: &FirstOrderU) -> f64 {
    let n = l.degree_bound;
    let k = l.k();
    let ut = if n % 2 == 1 { -u.u_inf } else { u.u_inf };
    let lu = if k.is_infinite() {
        1.0 / ut.abs()
    } else {
        (k + ut).abs() / (1.0 + k * ut).abs()
    };
    let f = gd.f_inf();
    if f == 0.0 {
        return 0.0;
    }
    f * lu
}

/// True iff the suboptimal controller has infinitely many RHP poles.
pub fn infinite_pole_test(gd: &GammaData, l: &ControllerL, u: &FirstOrderU) -> bool {
    if l.l2.is_zero() && u.u_inf == 0.0 {
        return false;
    }
    hf_limit(gd, l, u) >= 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Route {
    FiniteCase,
    InfinitePossible,
}

/// Relative-degree routing: W1 proper and W2 improper forces finitely many
/// unstable controller poles.
pub fn relative_degree_route(w: &Weights) -> Route {
    if w.w1.relative_degree() >= 0 && w.w2.relative_degree() < 0 {
        Route::FiniteCase
    } else {
        Route::InfinitePossible
    }
}
