//! Stable suboptimal design when the controller has finitely many RHP poles:
//! the free parameter U is built from a Nevanlinna–Pick interpolant on the
//! unit disk and accepted when ‖U‖∞ ≤ 1.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plantmodel::FactoredPlant;
use crate::quasipoly::{blaschke, golden_min, rhp_roots, stable_count, winding_count, ContourBox, RealPolynomial};
use crate::synthesis::{solve_l, ControllerL, FirstOrderU, GammaData, LMode, UParam, Weights, DEFAULT_EXTRA_POINT};
use crate::tolerance::Tolerances;

/// P1 = (L1 + L2 m_n F)/(n_E n_md) and P2 = (L2(−s) + L1(−s) m_n F)/(n_E n_md)
/// with their RHP zeros.
#[derive(Clone, Debug)]
pub struct P1P2 {
    fp: FactoredPlant,
    gd: GammaData,
    l: ControllerL,
    n_e: RealPolynomial,
    n_md: RealPolynomial,
    pub p: Vec<C64>,
    pub szeros: Vec<C64>,
    pub contour: ContourBox,
}

impl P1P2 {
    /// Rebuilds the evaluators around zero lists found earlier.
    pub fn from_known(
        fp: &FactoredPlant,
        gd: &GammaData,
        l: &ControllerL,
        p: Vec<C64>,
        szeros: Vec<C64>,
        contour: ContourBox,
    ) -> Self {
        Self {
            fp: fp.clone(),
            gd: gd.clone(),
            l: l.clone(),
            n_e: gd.e.num.clone(),
            n_md: fp.m_d_rational().num,
            p,
            szeros,
            contour,
        }
    }

    fn mnf(&self, s: C64) -> C64 {
        self.fp.m_n(s) * self.gd.f.eval(s)
    }

    pub fn g1(&self, s: C64) -> C64 {
        self.l.l1.eval_c(s) + self.l.l2.eval_c(s) * self.mnf(s)
    }

    pub fn g2(&self, s: C64) -> C64 {
        self.l.l2.eval_c(-s) + self.l.l1.eval_c(-s) * self.mnf(s)
    }

    fn common(&self, s: C64) -> C64 {
        self.n_e.eval_c(s) * self.n_md.eval_c(s)
    }

    pub fn p1(&self, s: C64) -> C64 {
        self.g1(s) / self.common(s)
    }

    pub fn p2(&self, s: C64) -> C64 {
        self.g2(s) / self.common(s)
    }

    /// P1/P2 without the removable factor.
    pub fn ratio(&self, s: C64) -> C64 {
        self.g1(s) / self.g2(s)
    }

    pub fn l(&self) -> &ControllerL {
        &self.l
    }

    pub fn gamma_data(&self) -> &GammaData {
        &self.gd
    }

    pub fn factored(&self) -> &FactoredPlant {
        &self.fp
    }
}

/// Box outside which |other/lead| < 1 holds (on the outer edges and the
/// axis tail), so `lead + m_n·other` has no zeros there since |m_n| ≤ 1.
fn dominance_box<A, B>(lead: &A, other: &B, lead_rhp: &[C64], min_extent: f64) -> Option<ContourBox>
where
    A: Fn(C64) -> C64,
    B: Fn(C64) -> C64,
{
    let r = |s: C64| (other(s) / lead(s)).norm();
    let grid = crate::logspace(1e-3, 1e5, 4000);
    let tail = grid.iter().rev().find(|&&w| r(C64::new(0.0, w)) >= 0.9).copied().unwrap_or(0.0);
    if r(C64::new(0.0, 1e7)) >= 0.9 {
        return None;
    }
    let mut ext = tail.max(min_extent).max(1.0);
    for z in lead_rhp {
        ext = ext.max(z.norm());
    }
    ext *= 1.5;
    for _ in 0..12 {
        let n = 600;
        let ok = (0..=n).all(|i| {
            let t = i as f64 / n as f64;
            r(C64::new(ext, -ext + 2.0 * ext * t)) < 1.0 && r(C64::new(ext * t, ext)) < 1.0
        });
        if ok {
            return ContourBox::rhp(ext, ext).ok();
        }
        ext *= 1.5;
    }
    None
}

fn zeros_of<F>(f: &F, dom: Option<ContourBox>, fallback: ContourBox, tol: &Tolerances) -> Result<(ContourBox, Vec<C64>)>
where
    F: Fn(C64) -> C64 + Sync,
{
    let b = match dom {
        Some(b) => b,
        None => stable_count(f, &fallback, tol)?.0,
    };
    let z = rhp_roots(f, &b, tol)?;
    for r in &z {
        if f(*r).norm() > 1e-6 * crate::quasipoly::contour::local_scale(f, *r).max(1.0) {
            return Err(Error::NonConvergence { iterations: tol.newton_iters });
        }
    }
    Ok((b, z))
}

pub fn build_p1p2(fp: &FactoredPlant, gd: &GammaData, l: &ControllerL, tol: &Tolerances) -> Result<P1P2> {
    if gd.f.relative_degree() < 1 {
        return Err(Error::Precondition("F must be strictly proper on the finite-pole route".into()));
    }
    let mut pp = P1P2 {
        fp: fp.clone(),
        gd: gd.clone(),
        l: l.clone(),
        n_e: gd.e.num.clone(),
        n_md: fp.m_d_rational().num,
        p: vec![],
        szeros: vec![],
        contour: ContourBox::rhp(1.0, 1.0)?,
    };
    let mut min_ext = 1.0f64;
    for z in fp.alpha.iter().chain(gd.beta.iter()) {
        min_ext = min_ext.max(z.norm());
    }
    let fallback = ContourBox::rhp(2.0 * min_ext, 4.0 * min_ext)?;

    let l1_rhp: Vec<C64> = l.l1.roots()?.into_iter().filter(|z| z.re > 0.0).collect();
    let l2m_rhp: Vec<C64> = l.l2.reflect().roots()?.into_iter().filter(|z| z.re > 0.0).collect();
    let d1 = dominance_box(
        &|s| l.l1.eval_c(s),
        &|s| l.l2.eval_c(s) * gd.f.eval(s),
        &l1_rhp,
        min_ext,
    );
    let d2 = dominance_box(
        &|s| l.l2.eval_c(-s),
        &|s| l.l1.eval_c(-s) * gd.f.eval(s),
        &l2m_rhp,
        min_ext,
    );
    let (b1, p) = zeros_of(&|s| pp.p1(s), d1, fallback, tol)?;
    let (b2, sz) = zeros_of(&|s| pp.p2(s), d2, fallback, tol)?;
    pp.p = p;
    pp.szeros = sz;
    pp.contour = ContourBox::rhp(b1.re_max.max(b2.re_max), b1.im_max.max(b2.im_max))?;
    Ok(pp)
}

/// Conformal-disk interpolation data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskData {
    pub a: f64,
    pub s: Vec<C64>,
    pub p: Vec<C64>,
    pub z: Vec<C64>,
    pub w: Vec<C64>,
    pub n_int: Vec<i32>,
}

impl DiskData {
    /// M̃_d, the Blaschke product on P1's zeros.
    pub fn md(&self, s: C64) -> C64 {
        blaschke(&self.p, s)
    }

    /// M̃, the Blaschke product on P2's zeros (not used by the design).
    pub fn m(&self, s: C64) -> C64 {
        blaschke(&self.s, s)
    }

    pub fn to_disk(&self, s: C64) -> C64 {
        (s - self.a) / (s + self.a)
    }

    pub fn from_disk(&self, z: C64) -> C64 {
        self.a * (1.0 + z) / (1.0 - z)
    }

    /// Interpolation targets g(z_i) = ln μ − ln w_i − 2πj n_i.
    pub fn targets(&self, mu: f64, n_int: &[i32]) -> Vec<C64> {
        self.w
            .iter()
            .zip(n_int)
            .map(|(w, &n)| mu.ln() - w.ln() - C64::new(0.0, 2.0 * std::f64::consts::PI * n as f64))
            .collect()
    }

    /// Index of the conjugate partner (self for real points).
    fn partners(&self) -> Vec<usize> {
        let n = self.z.len();
        let mut out: Vec<usize> = (0..n).collect();
        for i in 0..n {
            if self.s[i].im != 0.0 {
                if let Some(j) = (0..n).find(|&j| j != i && (self.s[j] - self.s[i].conj()).norm() <= 1e-8 * (1.0 + self.s[i].norm())) {
                    out[i] = j;
                }
            }
        }
        out
    }
}

pub fn disk_data(pp: &P1P2, a: f64) -> Result<DiskData> {
    disk_data_from(&pp.szeros, &pp.p, a)
}

pub fn disk_data_from(szeros: &[C64], p: &[C64], a: f64) -> Result<DiskData> {
    if !(a > 0.0) {
        return Err(Error::Precondition("conformal map parameter must be positive".into()));
    }
    let mut z = Vec::new();
    let mut w = Vec::new();
    for s in szeros {
        let zi = (s - a) / (s + a);
        if zi.norm() >= 1.0 - 1e-9 {
            return Err(Error::DegenerateMap { at: *s });
        }
        z.push(zi);
        w.push(1.0 / blaschke(p, *s));
    }
    Ok(DiskData { a, s: szeros.to_vec(), p: p.to_vec(), z, w, n_int: vec![0; szeros.len()] })
}

/// Smallest eigenvalue of a Hermitian matrix through its real symmetric
/// embedding [[A, −B], [B, A]].
pub fn hermitian_min_eig(h: &DMatrix<C64>) -> f64 {
    let n = h.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for k in 0..n {
            // Symmetrize against rounding.
            let v = 0.5 * (h[(i, k)] + h[(k, i)].conj());
            m[(i, k)] = v.re;
            m[(i + n, k + n)] = v.re;
            m[(i, k + n)] = -v.im;
            m[(i + n, k)] = v.im;
        }
    }
    SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn pick_matrix(dd: &DiskData, mu: f64, n_int: &[i32]) -> DMatrix<C64> {
    let g = dd.targets(mu, n_int);
    let n = g.len();
    DMatrix::from_fn(n, n, |i, k| (g[i] + g[k].conj()) / (1.0 - dd.z[i] * dd.z[k].conj()))
}

fn pick_ok(dd: &DiskData, mu: f64, n_int: &[i32]) -> bool {
    hermitian_min_eig(&pick_matrix(dd, mu, n_int)) >= -1e-9
}

/// Smallest μ with a PSD Pick matrix for one integer assignment.
pub fn mu_min(dd: &DiskData, n_int: &[i32]) -> Option<f64> {
    let wmin = dd.w.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
    let mut lo = 0.5 * wmin.min(1.0);
    if pick_ok(dd, lo, n_int) {
        return Some(lo);
    }
    let mut hi = 2.0 * lo;
    let mut k = 0;
    while !pick_ok(dd, hi, n_int) {
        lo = hi;
        hi *= 2.0;
        k += 1;
        if k > 200 {
            return None;
        }
    }
    while (hi - lo) > 1e-10 * hi {
        let m = (lo * hi).sqrt();
        if pick_ok(dd, m, n_int) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Some(hi)
}

/// Conjugate-antisymmetric integer assignments with |n_i| ≤ bound.
fn assignments(dd: &DiskData, bound: i32) -> Vec<Vec<i32>> {
    let part = dd.partners();
    let free: Vec<usize> = (0..dd.z.len()).filter(|&i| part[i] > i).collect();
    let mut out = vec![vec![0; dd.z.len()]];
    for &i in &free {
        let mut next = Vec::new();
        for a in &out {
            for n in -bound..=bound {
                let mut b = a.clone();
                b[i] = n;
                b[part[i]] = -n;
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// (μ_opt, integer assignment attaining it).
pub fn pick_mu_opt(dd: &DiskData, n_bound: i32) -> Result<(f64, Vec<i32>)> {
    if n_bound < 0 {
        return Err(Error::Precondition("integer bound must be non-negative".into()));
    }
    let all = assignments(dd, n_bound);
    let best = all
        .par_iter()
        .filter_map(|n| mu_min(dd, n).map(|m| (m, n.clone())))
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.iter().map(|x| x.abs()).sum::<i32>().cmp(&b.1.iter().map(|x| x.abs()).sum()))
        });
    best.ok_or_else(|| Error::Invalid("no integer assignment gives a PSD Pick matrix".into()))
}

/// Schur-class interpolant b = (g−1)/(g+1) in recursive form with free
/// parameter q = Q(a(1+z)/(1−z)).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpInterpolant {
    pub mu: f64,
    pub z: Vec<C64>,
    pub schur_chain: Vec<C64>,
    pub q: FirstOrderU,
    pub a: f64,
}

impl NpInterpolant {
    pub fn b(&self, z: C64) -> C64 {
        let s = self.a * (1.0 + z) / (1.0 - z);
        let mut f = if (1.0 - z).norm() < 1e-14 { C64::new(self.q.u_inf, 0.0) } else { self.q.eval(s) };
        for j in (0..self.z.len()).rev() {
            let bz = (z - self.z[j]) / (1.0 - self.z[j].conj() * z);
            let g = self.schur_chain[j];
            f = (g + bz * f) / (1.0 + g.conj() * bz * f);
        }
        f
    }

    pub fn g(&self, z: C64) -> C64 {
        let b = self.b(z);
        (1.0 + b) / (1.0 - b)
    }
}

/// Schur coefficients γ_j of the interpolation problem b(z_i) = b_i.
pub fn schur_chain(z: &[C64], b: &[C64]) -> Result<Vec<C64>> {
    let n = z.len();
    let mut vals = b.to_vec();
    let mut gam = Vec::with_capacity(n);
    for j in 0..n {
        let gj = vals[j];
        if gj.norm() >= 1.0 {
            return Err(Error::PickNotPsd { min_eig: 1.0 - gj.norm() });
        }
        gam.push(gj);
        for k in j + 1..n {
            let bz = (z[k] - z[j]) / (1.0 - z[j].conj() * z[k]);
            vals[k] = (vals[k] - gj) / ((1.0 - gj.conj() * vals[k]) * bz);
        }
    }
    Ok(gam)
}

pub fn np_interpolant(dd: &DiskData, mu: f64, q: FirstOrderU) -> Result<NpInterpolant> {
    if !q.is_valid() {
        return Err(Error::Invalid(format!("Q = {q:?} is not in the unit ball")));
    }
    let g = dd.targets(mu, &dd.n_int);
    let b: Vec<C64> = g.iter().map(|g| (g - 1.0) / (g + 1.0)).collect();
    let chain = schur_chain(&dd.z, &b)?;
    Ok(NpInterpolant { mu, z: dd.z.clone(), schur_chain: chain, q, a: dd.a })
}

/// U = ((1 − S)/S)·P1/P2 with S = μ M̃_d e^{−G_Q}.
#[derive(Clone, Debug)]
pub struct FinU {
    pub np: NpInterpolant,
    pub dd: DiskData,
    pub pp: P1P2,
}

impl FinU {
    pub fn s_u(&self, s: C64) -> C64 {
        let g = self.np.g(self.dd.to_disk(s));
        self.np.mu * self.dd.md(s) * (-g).exp()
    }

    pub fn eval(&self, s: C64) -> C64 {
        let sv = self.s_u(s);
        (1.0 - sv) / sv * self.pp.ratio(s)
    }

    pub fn to_uparam(&self) -> UParam {
        let me = self.clone();
        UParam::Func(Arc::new(move |s| me.eval(s)))
    }

    /// Largest |U(jω)| on a log grid with refinement at local maxima.
    pub fn max_ratio(&self) -> f64 {
        let grid = crate::logspace(1e-2, 1e4, 3000);
        let f = |w: f64| self.eval(C64::new(0.0, w)).norm();
        let v: Vec<f64> = grid.iter().map(|&w| f(w)).collect();
        let mut best = v.iter().cloned().fold(f(0.0), f64::max);
        for i in 1..grid.len() - 1 {
            if v[i] >= v[i - 1] && v[i] >= v[i + 1] {
                let (_, m) = golden_min(&|w| -f(w), grid[i - 1], grid[i + 1], 40);
                best = best.max(-m);
            }
        }
        best
    }
}

pub fn compute_su_and_u(np: &NpInterpolant, dd: &DiskData, pp: &P1P2) -> Result<FinU> {
    let fu = FinU { np: np.clone(), dd: dd.clone(), pp: pp.clone() };
    for s in &dd.s {
        let r = (fu.s_u(*s) - 1.0).norm();
        if r > 1e-6 {
            return Err(Error::CancellationFailure { what: format!("S(s_i) = 1 at {s}"), residual: r });
        }
    }
    for p in &dd.p {
        let r = fu.s_u(*p).norm();
        if r > 1e-6 {
            return Err(Error::CancellationFailure { what: format!("S(p_i) = 0 at {p}"), residual: r });
        }
    }
    Ok(fu)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FinCertificate {
    pub mu: f64,
    /// `None` for the U = 0 shortcut.
    pub q: Option<FirstOrderU>,
    pub max_ratio: f64,
    pub stable: bool,
    pub rho: f64,
    pub mu_opt: Option<f64>,
    pub p: Vec<C64>,
    pub szeros: Vec<C64>,
    #[serde(skip)]
    pub u: Option<FinU>,
}

impl FinCertificate {
    pub fn u_param(&self) -> UParam {
        match &self.u {
            Some(u) => u.to_uparam(),
            None => UParam::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FinSearchOptions {
    pub a: f64,
    pub n_bound: i32,
    /// Multipliers of μ_opt; `mu_absolute` values are appended.
    pub mu_factors: Vec<f64>,
    pub mu_absolute: Vec<f64>,
    pub q_step: f64,
    pub extra_point: f64,
}

impl Default for FinSearchOptions {
    fn default() -> Self {
        Self {
            a: 1.0,
            n_bound: 2,
            mu_factors: vec![2.0, 5.0, 10.0, 20.0],
            mu_absolute: vec![100.0],
            q_step: 0.01,
            extra_point: DEFAULT_EXTRA_POINT,
        }
    }
}

impl FinSearchOptions {
    pub fn schedule(&self, mu_opt: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.mu_factors.iter().map(|f| f * mu_opt).collect();
        v.extend(self.mu_absolute.iter().filter(|&&m| m > mu_opt));
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        v
    }
}

/// Constant Q values in [−1, 1] on the grid and their max |U(jω)|.
pub fn q_scan(dd: &DiskData, pp: &P1P2, mu: f64, step: f64) -> Vec<(f64, Result<f64>)> {
    let n = (2.0 / step).round() as i64;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let q = -1.0 + 2.0 * i as f64 / n as f64;
            let q = (q * 1e9).round() / 1e9;
            let r = np_interpolant(dd, mu, FirstOrderU::constant(q))
                .and_then(|np| compute_su_and_u(&np, dd, pp))
                .map(|u| u.max_ratio());
            (q, r)
        })
        .collect()
}

/// Feasible constant-Q values (max |U| ≤ 1).
pub fn feasible_window(dd: &DiskData, pp: &P1P2, mu: f64, step: f64) -> Vec<f64> {
    q_scan(dd, pp, mu, step)
        .into_iter()
        .filter_map(|(q, r)| match r {
            Ok(m) if m <= 1.0 => Some(q),
            _ => None,
        })
        .collect()
}

/// Level data kept for reporting.
#[derive(Clone, Debug)]
pub struct FinLevel {
    pub pp: P1P2,
    pub dd: Option<DiskData>,
    pub mu_opt: Option<f64>,
}

/// Steps 1–6 over the ρ schedule; returns the first feasible certificate.
pub fn search_fin(
    rho_schedule: &[f64],
    gamma_opt: f64,
    fp: &FactoredPlant,
    w: &Weights,
    opts: &FinSearchOptions,
    tol: &Tolerances,
) -> Result<(FinCertificate, FinLevel)> {
    if rho_schedule.is_empty() || rho_schedule.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Precondition("rho schedule must be non-empty and increasing".into()));
    }
    if rho_schedule[0] <= gamma_opt {
        return Err(Error::Precondition(format!(
            "rho = {} is not above gamma_opt = {gamma_opt}",
            rho_schedule[0]
        )));
    }
    let mut diag = Vec::new();
    for &rho in rho_schedule {
        let mut step = || -> Result<Option<(FinCertificate, FinLevel)>> {
            let gd = GammaData::new(rho, w)?;
            let l = solve_l(fp, &gd, LMode::Suboptimal, opts.extra_point)?;
            let pp = build_p1p2(fp, &gd, &l, tol)?;
            if pp.p.is_empty() {
                let cert = FinCertificate {
                    mu: 0.0,
                    q: None,
                    max_ratio: 0.0,
                    stable: true,
                    rho,
                    mu_opt: None,
                    p: vec![],
                    szeros: pp.szeros.clone(),
                    u: None,
                };
                return Ok(Some((cert, FinLevel { pp, dd: None, mu_opt: None })));
            }
            let mut dd = disk_data(&pp, opts.a)?;
            let (mu_opt, n_int) = pick_mu_opt(&dd, opts.n_bound)?;
            dd.n_int = n_int;
            for mu in opts.schedule(mu_opt) {
                let scan = q_scan(&dd, &pp, mu, opts.q_step);
                let best = scan
                    .iter()
                    .filter_map(|(q, r)| r.as_ref().ok().filter(|m| **m <= 1.0).map(|m| (*q, *m)))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.abs().partial_cmp(&b.0.abs()).unwrap()));
                match best {
                    Some((q, m)) => {
                        let q = FirstOrderU::constant(q);
                        let np = np_interpolant(&dd, mu, q)?;
                        let fu = compute_su_and_u(&np, &dd, &pp)?;
                        let cert = FinCertificate {
                            mu,
                            q: Some(q),
                            max_ratio: m,
                            stable: true,
                            rho,
                            mu_opt: Some(mu_opt),
                            p: pp.p.clone(),
                            szeros: pp.szeros.clone(),
                            u: Some(fu),
                        };
                        return Ok(Some((cert, FinLevel { pp, dd: Some(dd), mu_opt: Some(mu_opt) })));
                    }
                    None => {
                        let min = scan.iter().filter_map(|(_, r)| r.as_ref().ok()).cloned().fold(f64::INFINITY, f64::min);
                        diag.push(format!("rho={rho}, mu={mu:.4}: no feasible Q (smallest max|U| = {min:.4})"));
                    }
                }
            }
            Ok(None)
        };
        match step() {
            Ok(Some(r)) => return Ok(r),
            Ok(None) => {}
            Err(e) => diag.push(format!("rho={rho}: {e}")),
        }
    }
    Err(Error::SearchExhausted { diagnostics: diag })
}

/// Zero count of P1 + P2·U (= P1/S) over a box; zero for a sound certificate.
pub fn certificate_zero_count(fu: &FinU, b: &ContourBox, tol: &Tolerances) -> Result<i64> {
    let f = |s: C64| fu.pp.p1(s) + fu.pp.p2(s) * fu.eval(s);
    winding_count(&f, b, &[], tol)
}
