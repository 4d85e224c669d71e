//! Stable suboptimal design when the central controller has infinitely many
//! unstable poles: admissible `u∞` intervals, a first-order `U` search on
//! `(ω_max, η_max)` and a Nyquist encirclement certificate.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plantmodel::FactoredPlant;
use crate::quasipoly::{golden_min, nyquist_path, ContourBox};
use crate::synthesis::{
    hf_limit, infinite_pole_test, l1u_l2u, solve_l, ControllerL, FirstOrderU, GammaData, LMode,
    Weights, DEFAULT_EXTRA_POINT,
};
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticData {
    pub f_inf: f64,
    pub k: f64,
    /// n1 + ℓ mod 2
    pub parity: u8,
}

pub fn asymptotics(gd: &GammaData, l: &ControllerL) -> AsymptoticData {
    AsymptoticData { f_inf: gd.f_inf(), k: l.k(), parity: (l.degree_bound % 2) as u8 }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (self.lo_closed && x == self.lo)) && (x < self.hi || (self.hi_closed && x == self.hi))
    }

    fn negated(&self) -> Self {
        Self { lo: -self.hi, hi: -self.lo, lo_closed: self.hi_closed, hi_closed: self.lo_closed }
    }
}

/// Sorted disjoint intervals inside [−1, 1].
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn full() -> Self {
        Self { intervals: vec![Interval { lo: -1.0, hi: 1.0, lo_closed: true, hi_closed: true }] }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    fn push(&mut self, i: Interval) {
        let lo = i.lo.max(-1.0);
        let hi = i.hi.min(1.0);
        if lo < hi || (lo == hi && i.lo_closed && i.hi_closed) {
            self.intervals.push(Interval {
                lo,
                hi,
                lo_closed: if lo > i.lo { true } else { i.lo_closed },
                hi_closed: if hi < i.hi { true } else { i.hi_closed },
            });
        }
    }

    fn negated(&self) -> Self {
        let mut v: Vec<Interval> = self.intervals.iter().map(|i| i.negated()).collect();
        v.reverse();
        Self { intervals: v }
    }
}

/// Admissible u∞ values giving finitely many RHP controller poles.
///
/// Works on ũ = (−1)^{n1+ℓ}u∞, where the high-frequency gain of F·L_U is
/// f∞|(k+ũ)/(1+kũ)|, then maps back.
pub fn admissible_uinf(ad: &AsymptoticData) -> IntervalSet {
    let (f, k) = (ad.f_inf, ad.k);
    let mut set = IntervalSet::default();
    if f == 0.0 {
        set = IntervalSet::full();
    } else if k.is_infinite() {
        // L_U → 1/ũ: need |ũ| > f.
        set.push(Interval { lo: -1.0, hi: -f, lo_closed: true, hi_closed: false });
        set.push(Interval { lo: f, hi: 1.0, lo_closed: false, hi_closed: true });
    } else if k.abs() < 1.0 {
        if f < 1.0 {
            set = IntervalSet::full();
        } else {
            let lo = -(1.0 + f * k) / (f + k);
            let hi = (1.0 - f * k) / (f - k).abs();
            set.push(Interval { lo, hi, lo_closed: false, hi_closed: false });
        }
    } else if f < 1.0 {
        if k.abs() == 1.0 {
            set = IntervalSet::full();
        } else {
            // Endpoints solve (k+ũ)/(1+kũ) = ∓1/f; they straddle the pole
            // ũ = −1/k in either order depending on sign(k).
            let a = -(1.0 + f * k) / (f + k);
            let b = (1.0 - f * k) / (f - k);
            let (lo, hi) = (a.min(b), a.max(b));
            set.push(Interval { lo: -1.0, hi: lo, lo_closed: true, hi_closed: false });
            set.push(Interval { lo: hi, hi: 1.0, lo_closed: false, hi_closed: true });
        }
    }
    if ad.parity == 1 {
        set.negated()
    } else {
        set
    }
}

/// L_1U numerator has all roots in the open LHP.
pub fn l1u_stable(l: &ControllerL, u: &FirstOrderU) -> bool {
    let (l1u, _, _) = l1u_l2u(l, u);
    let p = l1u.trimmed(1e-12);
    if p.is_zero() {
        return false;
    }
    if p.degree() == 0 {
        return true;
    }
    // Hurwitz polynomials have coefficients of one sign.
    let sgn = p.leading().signum();
    if p.coeffs().iter().any(|c| c * sgn <= 0.0) {
        return false;
    }
    p.roots().map(|r| r.iter().all(|z| z.re < 0.0)).unwrap_or(false)
}

/// Subset of the grid with stable L_1U.
pub fn l1u_stable_region(l: &ControllerL, grid: &[FirstOrderU]) -> Vec<FirstOrderU> {
    grid.par_iter().copied().filter(|u| l1u_stable(l, u)).collect()
}

/// Constant-U values in [−1, 1] with stable L_1U, as intervals refined by
/// bisection at the scan boundaries.
pub fn constant_l1u_intervals(l: &ControllerL, step: f64) -> IntervalSet {
    let n = (2.0 / step).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
    let ok: Vec<bool> = xs.par_iter().map(|&u| l1u_stable(l, &FirstOrderU::constant(u))).collect();
    let edge = |a: f64, b: f64, a_ok: bool| {
        let (mut a, mut b) = (a, b);
        for _ in 0..50 {
            let m = 0.5 * (a + b);
            if l1u_stable(l, &FirstOrderU::constant(m)) == a_ok {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let mut set = IntervalSet::default();
    let mut start: Option<f64> = None;
    for i in 0..=n {
        if ok[i] && start.is_none() {
            start = Some(if i == 0 { -1.0 } else { edge(xs[i], xs[i - 1], true) });
        }
        if start.is_some() && (!ok[i] || i == n) {
            let hi = if ok[i] { 1.0 } else { edge(xs[i - 1], xs[i], true) };
            set.intervals.push(Interval { lo: start.unwrap(), hi, lo_closed: ok[0] && start == Some(-1.0), hi_closed: ok[i] });
            start = None;
        }
    }
    set
}

fn flu(gd: &GammaData, l: &ControllerL, u: &FirstOrderU, w: f64) -> f64 {
    let s = C64::new(0.0, w);
    let uv = u.eval(s);
    let lu = (l.l2.eval_c(s) + l.l1.eval_c(-s) * uv) / (l.l1.eval_c(s) + l.l2.eval_c(-s) * uv);
    (gd.f.eval(s) * lu).norm()
}

/// (ω_max, η_max): last unity crossing of |L_U F| and its supremum.
pub fn objective(u: &FirstOrderU, gd: &GammaData, l: &ControllerL) -> (f64, f64) {
    let grid = crate::logspace(1e-2, 1e4, 2000);
    let m: Vec<f64> = grid.iter().map(|&w| flu(gd, l, u, w)).collect();
    let g = |w: f64| flu(gd, l, u, w);
    let mut omega_max = 0.0;
    let dc = g(0.0);
    if let Some(i) = (0..grid.len() - 1).rev().find(|&i| (m[i] - 1.0) * (m[i + 1] - 1.0) <= 0.0) {
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        let above = m[i] >= 1.0;
        for _ in 0..60 {
            let c = 0.5 * (a + b);
            if (g(c) >= 1.0) == above {
                a = c;
            } else {
                b = c;
            }
        }
        omega_max = 0.5 * (a + b);
    } else if m[0] >= 1.0 && dc >= 1.0 {
        // Above one from DC up to the first grid point only.
        omega_max = grid[0];
    }
    let (imax, _) = m.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let lo = if imax == 0 { 0.0 } else { grid[imax - 1] };
    let hi = grid[(imax + 1).min(grid.len() - 1)];
    let (_, neg) = golden_min(&|w: f64| -g(w), lo, hi, 60);
    let eta = (-neg).max(m[imax]).max(dc).max(hf_limit(gd, l, u));
    (omega_max, eta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabSearchResult {
    pub u: FirstOrderU,
    pub omega_max: f64,
    pub eta_max: f64,
    pub encirclements: i64,
    pub required: i64,
    pub stable: bool,
    pub rho: f64,
    pub contour: ContourBox,
    #[serde(skip)]
    pub nyquist: Vec<(C64, C64)>,
}

/// Frequency beyond which |F L_U| stays below 1 − 10⁻³ on the scan grid.
fn tail_frequency(gd: &GammaData, l: &ControllerL, u: &FirstOrderU) -> f64 {
    let grid = crate::logspace(1e-3, 1e5, 4000);
    grid.iter()
        .rev()
        .find(|&&w| flu(gd, l, u, w) >= 1.0 - 1e-3)
        .copied()
        .unwrap_or(0.0)
}

/// Contour box enclosing D = {|m_n F L_U| > 1} and all off-axis RHP zeros
/// of E and m_d, checked by |F L_U| < 1 on the outer edges.
pub fn certify_box(fp: &FactoredPlant, gd: &GammaData, l: &ControllerL, u: &FirstOrderU) -> Result<ContourBox> {
    let flu_s = |s: C64| {
        let uv = u.eval(s);
        let lu = (l.l2.eval_c(s) + l.l1.eval_c(-s) * uv) / (l.l1.eval_c(s) + l.l2.eval_c(-s) * uv);
        (gd.f.eval(s) * lu).norm()
    };
    let mut omega = tail_frequency(gd, l, u).max(1.0);
    for z in fp.alpha.iter().chain(gd.beta.iter()) {
        omega = omega.max(z.norm());
    }
    omega *= 1.5;
    for _ in 0..12 {
        let b = ContourBox::new(0.0, omega, -omega, omega)?;
        let n = 400;
        let edge_ok = (0..=n).all(|i| {
            let t = i as f64 / n as f64;
            let right = C64::new(omega, -omega + 2.0 * omega * t);
            let top = C64::new(omega * t, omega);
            flu_s(right) < 1.0 && flu_s(top) < 1.0
        });
        if edge_ok {
            return Ok(b);
        }
        omega *= 1.5;
    }
    Err(Error::Precondition("no contour box with |F L_U| < 1 on its outer edges".into()))
}

/// Encirclement count of −1 by m_n F L_U against the off-axis RHP zeros of
/// E and m_d.
pub fn certify(
    u: &FirstOrderU,
    fp: &FactoredPlant,
    gd: &GammaData,
    l: &ControllerL,
    tol: &Tolerances,
) -> Result<StabSearchResult> {
    if infinite_pole_test(gd, l, u) {
        return Err(Error::Precondition(format!(
            "U = {u:?} leaves infinitely many unstable controller poles"
        )));
    }
    let b = certify_box(fp, gd, l, u)?;
    let mut indents: Vec<f64> = gd.axis_beta.clone();
    indents.extend(gd.axis_beta.iter().map(|w| -w));
    let x = |s: C64| {
        let uv = u.eval(s);
        let lu = (l.l2.eval_c(s) + l.l1.eval_c(-s) * uv) / (l.l1.eval_c(s) + l.l2.eval_c(-s) * uv);
        fp.m_n(s) * gd.f.eval(s) * lu
    };
    let (enc, nyquist) = nyquist_path(&x, &b, &indents, tol)?;
    let required = fp.alpha.len() as i64 + gd.beta.iter().filter(|z| z.re != 0.0).count() as i64;
    let (omega_max, eta_max) = objective(u, gd, l);
    Ok(StabSearchResult {
        u: *u,
        omega_max,
        eta_max,
        encirclements: enc,
        required,
        stable: enc == required && l1u_stable(l, u),
        rho: gd.level,
        contour: b,
        nyquist,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InfSearchOptions {
    pub u_step: f64,
    pub first_order: bool,
    pub first_order_u_step: f64,
    pub uz_range: (f64, f64, f64),
    pub up_range: (f64, f64, f64),
    pub omega_scale: f64,
    /// Candidates certified per ρ before moving on.
    pub max_certify: usize,
    pub extra_point: f64,
}

impl Default for InfSearchOptions {
    fn default() -> Self {
        Self {
            u_step: 0.005,
            first_order: true,
            first_order_u_step: 0.05,
            uz_range: (-10.0, 10.0, 0.5),
            up_range: (0.5, 10.0, 0.5),
            omega_scale: 1.0,
            max_certify: 8,
            extra_point: DEFAULT_EXTRA_POINT,
        }
    }
}

fn range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as i64;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// Candidates ranked by max{ω_max, η_max·scale}, ties by lexicographic U.
fn rank(
    cands: Vec<FirstOrderU>,
    gd: &GammaData,
    l: &ControllerL,
    scale: f64,
) -> Vec<(f64, FirstOrderU)> {
    let mut v: Vec<(f64, FirstOrderU)> = cands
        .par_iter()
        .map(|u| {
            let (w, e) = objective(u, gd, l);
            (w.max(e * scale), *u)
        })
        .collect();
    v.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.u_inf.partial_cmp(&b.1.u_inf).unwrap())
            .then(a.1.u_z.partial_cmp(&b.1.u_z).unwrap())
            .then(a.1.u_p.partial_cmp(&b.1.u_p).unwrap())
    });
    v
}

/// Outcome of the search at one level, kept for reporting.
#[derive(Clone, Debug)]
pub struct InfLevel {
    pub gd: GammaData,
    pub l: ControllerL,
    pub asymptotics: AsymptoticData,
    pub admissible: IntervalSet,
}

/// Steps 1–6 over the ρ schedule; returns the first certified result.
pub fn search(
    rho_schedule: &[f64],
    gamma_opt: f64,
    fp: &FactoredPlant,
    w: &Weights,
    opts: &InfSearchOptions,
    tol: &Tolerances,
) -> Result<(StabSearchResult, InfLevel)> {
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
        let gd = match GammaData::new(rho, w) {
            Ok(g) => g,
            Err(e) => {
                diag.push(format!("rho={rho}: {e}"));
                continue;
            }
        };
        let l = match solve_l(fp, &gd, LMode::Suboptimal, opts.extra_point) {
            Ok(l) => l,
            Err(e) => {
                diag.push(format!("rho={rho}: {e}"));
                continue;
            }
        };
        let ad = asymptotics(&gd, &l);
        let adm = admissible_uinf(&ad);
        if adm.is_empty() {
            diag.push(format!("rho={rho}: no admissible u_inf (f_inf={:.4}, k={:.4})", ad.f_inf, ad.k));
            continue;
        }
        let level = InfLevel { gd: gd.clone(), l: l.clone(), asymptotics: ad, admissible: adm.clone() };
        let constant: Vec<FirstOrderU> = range(-1.0, 1.0, opts.u_step)
            .into_iter()
            .filter(|u| adm.contains(*u))
            .map(FirstOrderU::constant)
            .filter(|u| !infinite_pole_test(&gd, &l, u))
            .collect();
        let mut passes = vec![l1u_stable_region(&l, &constant)];
        if opts.first_order {
            let mut grid = Vec::new();
            for ui in range(-1.0, 1.0, opts.first_order_u_step).into_iter().filter(|u| adm.contains(*u)) {
                for uz in range(opts.uz_range.0, opts.uz_range.1, opts.uz_range.2) {
                    for up in range(opts.up_range.0, opts.up_range.1, opts.up_range.2) {
                        if let Ok(u) = FirstOrderU::new(ui, uz, up) {
                            if !u.is_constant() && !infinite_pole_test(&gd, &l, &u) {
                                grid.push(u);
                            }
                        }
                    }
                }
            }
            passes.push(grid);
        }
        for (pi, cands) in passes.into_iter().enumerate() {
            let cands = if pi == 0 { cands } else { l1u_stable_region(&l, &cands) };
            if cands.is_empty() {
                diag.push(format!("rho={rho}: pass {pi}: no U with stable L1U"));
                continue;
            }
            let ranked = rank(cands, &gd, &l, opts.omega_scale);
            for (_, u) in ranked.iter().take(opts.max_certify) {
                match certify(u, fp, &gd, &l, tol) {
                    Ok(r) if r.stable => return Ok((r, level)),
                    Ok(r) => diag.push(format!(
                        "rho={rho}: U={u:?}: {} encirclements, {} required",
                        r.encirclements, r.required
                    )),
                    Err(e) => diag.push(format!("rho={rho}: U={u:?}: {e}")),
                }
            }
        }
    }
    Err(Error::SearchExhausted { diagnostics: diag })
}

/// Direct zero count of 1 + m_n F L_U over a box, used as an independent
/// check of the certificate.
pub fn direct_zero_count(
    u: &FirstOrderU,
    fp: &FactoredPlant,
    gd: &GammaData,
    l: &ControllerL,
    b: &ContourBox,
    tol: &Tolerances,
) -> Result<i64> {
    let mut indents: Vec<f64> = gd.axis_beta.clone();
    indents.extend(gd.axis_beta.iter().map(|w| -w));
    let f = |s: C64| {
        let uv = u.eval(s);
        let lu = (l.l2.eval_c(s) + l.l1.eval_c(-s) * uv) / (l.l1.eval_c(s) + l.l2.eval_c(-s) * uv);
        1.0 + fp.m_n(s) * gd.f.eval(s) * lu
    };
    crate::quasipoly::winding_count(&f, b, &indents, tol)
}

/// Angle helper for plots: unwrap a phase sequence.
pub fn unwrap_phase(ph: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(ph.len());
    let mut off = 0.0;
    for (i, &p) in ph.iter().enumerate() {
        if i > 0 {
            let d = p - ph[i - 1];
            if d > PI {
                off -= 2.0 * PI;
            } else if d < -PI {
                off += 2.0 * PI;
            }
        }
        out.push(p + off);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::tests::{ex1_plant, w_ex1};
    use proptest::prelude::*;

    fn level_ex1() -> (FactoredPlant, GammaData, ControllerL) {
        let fp = ex1_plant();
        let gd = GammaData::new(0.67, &w_ex1()).unwrap();
        let l = solve_l(&fp, &gd, LMode::Suboptimal, DEFAULT_EXTRA_POINT).unwrap();
        (fp, gd, l)
    }

    #[test]
    fn example_asymptotics_and_interval() {
        let (_, gd, l) = level_ex1();
        let ad = asymptotics(&gd, &l);
        assert!((ad.k - 0.79).abs() < 0.01 && (ad.f_inf - 1.33).abs() < 0.01);
        assert_eq!(ad.parity, 1);
        let set = admissible_uinf(&ad);
        assert_eq!(set.intervals.len(), 1);
        let i = set.intervals[0];
        assert!((i.lo - 0.095).abs() < 0.01 && (i.hi - 0.96).abs() < 0.01, "{i:?}");
    }

    #[test]
    fn trivial_interval_cases() {
        let full = admissible_uinf(&AsymptoticData { f_inf: 0.5, k: 0.3, parity: 0 });
        assert_eq!(full, IntervalSet::full());
        let none = admissible_uinf(&AsymptoticData { f_inf: 1.5, k: 1.2, parity: 0 });
        assert!(none.is_empty());
        let all = admissible_uinf(&AsymptoticData { f_inf: 0.0, k: 3.0, parity: 1 });
        assert_eq!(all, IntervalSet::full());
    }

    fn brute(ad: &AsymptoticData, u: f64) -> bool {
        let ut = if ad.parity == 1 { -u } else { u };
        let g = (ad.k + ut) / (1.0 + ad.k * ut);
        ad.f_inf * g.abs() < 1.0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn interval_matches_inequality_scan(f in 0.05f64..3.0, k in -3.0f64..3.0, parity in 0u8..2) {
            let ad = AsymptoticData { f_inf: f, k, parity };
            let set = admissible_uinf(&ad);
            let step = 1e-3;
            for i in 0..=2000 {
                let u = -1.0 + step * i as f64;
                let near_edge = set.intervals.iter().any(|iv| (u - iv.lo).abs() <= step || (u - iv.hi).abs() <= step);
                // Also skip the pole of (k+ũ)/(1+kũ).
                let ut = if parity == 1 { -u } else { u };
                let near_pole = (1.0 + k * ut).abs() < 2.0 * step * k.abs().max(1.0);
                if !near_edge && !near_pole {
                    prop_assert_eq!(set.contains(u), brute(&ad, u), "u = {}", u);
                }
            }
        }
    }

    #[test]
    fn l1u_constant_interval() {
        let (_, _, l) = level_ex1();
        assert!(l1u_stable(&l, &FirstOrderU::constant(0.0)));
        let set = constant_l1u_intervals(&l, 0.001);
        assert_eq!(set.intervals.len(), 1, "{set:?}");
        let i = set.intervals[0];
        assert!((i.lo + 0.19).abs() < 0.02 && (i.hi - 0.46).abs() < 0.02, "{i:?}");
    }

    #[test]
    fn l1u_first_order_limit() {
        let (_, _, l) = level_ex1();
        for u in [0.1, 0.3, 0.44] {
            let c = l1u_stable(&l, &FirstOrderU::constant(u));
            let f = l1u_stable(&l, &FirstOrderU::new(u, 1e4 + 1e-3, 1e4).unwrap());
            assert_eq!(c, f);
        }
    }

    #[test]
    fn objective_curves_cross_near_035() {
        let (_, gd, l) = level_ex1();
        let diff = |u: f64| {
            let (w, e) = objective(&FirstOrderU::constant(u), &gd, &l);
            w - e
        };
        let (mut a, mut b) = (0.2, 0.45);
        assert!(diff(a).signum() != diff(b).signum());
        for _ in 0..30 {
            let m = 0.5 * (a + b);
            if diff(m).signum() == diff(a).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((a - 0.35).abs() < 0.03, "{a}");
        let (w, e) = objective(&FirstOrderU::constant(0.3), &gd, &l);
        assert!(w > 0.0 && e >= 1.0);
    }

    #[test]
    fn certificate_at_035() {
        let (fp, gd, l) = level_ex1();
        let tol = Tolerances::default();
        let r = certify(&FirstOrderU::constant(0.35), &fp, &gd, &l, &tol).unwrap();
        assert_eq!(r.encirclements, 2);
        assert_eq!(r.required, 2);
        assert!(r.stable);
        // Doubling the imaginary extent does not change the count.
        let big = ContourBox { im_min: 2.0 * r.contour.im_min, im_max: 2.0 * r.contour.im_max, ..r.contour };
        let c = direct_zero_count(&FirstOrderU::constant(0.35), &fp, &gd, &l, &big, &tol).unwrap();
        assert_eq!(c, 2);
    }

    #[test]
    fn perturbed_certificate_matches_direct_count() {
        let (fp, gd, l) = level_ex1();
        let tol = Tolerances::default();
        let u = FirstOrderU::constant(0.10);
        let r = certify(&u, &fp, &gd, &l, &tol).unwrap();
        let c = direct_zero_count(&u, &fp, &gd, &l, &r.contour, &tol).unwrap();
        assert_eq!(r.encirclements, c);
        assert_eq!(r.stable, c == r.required && l1u_stable(&l, &u));
    }

    #[test]
    fn outside_admissible_is_rejected() {
        let (fp, gd, l) = level_ex1();
        let r = certify(&FirstOrderU::constant(0.0), &fp, &gd, &l, &Tolerances::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn schedule_below_gamma_opt_is_rejected() {
        let fp = ex1_plant();
        let r = search(&[0.5], 0.57, &fp, &w_ex1(), &InfSearchOptions::default(), &Tolerances::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn search_picks_constant_near_035() {
        let fp = ex1_plant();
        let (r, level) =
            search(&[0.67], 0.57, &fp, &w_ex1(), &InfSearchOptions::default(), &Tolerances::default()).unwrap();
        assert!(r.u.is_constant());
        assert!((r.u.u_inf - 0.35).abs() < 0.03, "{:?}", r.u);
        assert!(level.admissible.contains(r.u.u_inf));
        assert_eq!((r.encirclements, r.required), (2, 2));
    }
}
