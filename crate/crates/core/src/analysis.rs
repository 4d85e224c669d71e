//! Closed-loop verification: mixed-sensitivity norm, Nyquist-based internal
//! stability, controller RHP poles and frequency responses.

use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quasipoly::{golden_min, rhp_roots, winding_count, ContourBox};
use crate::synthesis::{Controller, Weights};
use crate::tolerance::Tolerances;

/// sup_ω sqrt(|W1 S|² + |W2 T|²) with S = 1/(1+PC), T = PC S.
pub fn mixed_sensitivity_norm<F>(pc: &F, w: &Weights) -> Result<f64>
where
    F: Fn(C64) -> C64 + Sync,
{
    let cost = |om: f64| -> Result<f64> {
        let s = C64::new(0.0, om);
        let l = pc(s);
        let rd = 1.0 + l;
        if !(rd.norm() > 1e-12) {
            return Err(Error::IllPosed { omega: om, value: rd.norm() });
        }
        let a = w.w1.eval(s) / rd;
        let b = w.w2.eval(s) * l / rd;
        Ok((a.norm_sqr() + b.norm_sqr()).sqrt())
    };
    let mut grid = vec![0.0];
    grid.extend(crate::logspace(1e-3, 1e4, 4000));
    let vals: Vec<f64> = grid.par_iter().map(|&o| cost(o)).collect::<Result<_>>()?;
    let mut peak = vals.iter().cloned().fold(0.0, f64::max);
    let safe = |o: f64| cost(o).unwrap_or(f64::INFINITY);
    let mut maxima: Vec<usize> = (1..grid.len() - 1)
        .filter(|&i| vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] && vals[i] >= 0.5 * peak)
        .collect();
    maxima.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    maxima.truncate(16);
    for i in maxima {
        let (mut lo, mut hi) = (grid[i - 1], grid[i + 1]);
        let mut last = vals[i];
        // Re-grid the bracket until the local peak settles.
        for _ in 0..8 {
            let sub = crate::linspace(lo, hi, 41);
            let v: Vec<f64> = sub.iter().map(|&o| safe(o)).collect();
            let (k, m) = v.iter().enumerate().fold((0, f64::MIN), |b, (k, &x)| if x > b.1 { (k, x) } else { b });
            lo = sub[k.saturating_sub(1)];
            hi = sub[(k + 1).min(40)];
            let settled = (m - last).abs() <= 1e-4 * m.abs();
            last = last.max(m);
            if settled {
                break;
            }
        }
        let (o, m) = golden_min(&|o| -safe(o), lo, hi, 60);
        let m = (-m).max(last);
        if !m.is_finite() {
            return Err(Error::IllPosed { omega: o, value: 0.0 });
        }
        peak = peak.max(m);
    }
    Ok(peak)
}

/// Nyquist bookkeeping: with `open_loop_poles` RHP poles of PC in the box,
/// the closed loop has winding(1+PC) + open_loop_poles unstable poles there.
/// Returns (stable, closed-loop RHP pole count).
pub fn closed_loop_stable<F>(
    pc: &F,
    open_loop_poles: i64,
    b: &ContourBox,
    indents: &[f64],
    tol: &Tolerances,
) -> Result<(bool, i64)>
where
    F: Fn(C64) -> C64 + Sync,
{
    let f = |s: C64| 1.0 + pc(s);
    let w = winding_count(&f, b, indents, tol)?;
    let z = w + open_loop_poles;
    Ok((z == 0, z))
}

/// L_1U + L_2U m_n F: analytic in the RHP and zero exactly where 1 + X is,
/// except that it stays finite at the zeros of L_1U.
pub fn characteristic(c: &Controller, s: C64) -> C64 {
    let u = c.u.eval(s);
    let (l1, l2) = (&c.l.l1, &c.l.l2);
    let l1u = l1.eval_c(s) + l2.eval_c(-s) * u;
    let l2u = l2.eval_c(s) + l1.eval_c(-s) * u;
    l1u + l2u * c.fp.m_n(s) * c.gd.f.eval(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    pub count: usize,
    pub poles: Vec<C64>,
    /// Zeros cancelled by E and m_d.
    pub cancelled: Vec<C64>,
    pub contour: ContourBox,
}

/// Last frequency with |F L_U(jω)| ≥ 1 − 10⁻³ on a log grid, or `None`
/// when the magnitude does not fall below one by 10⁵ rad/s.
fn unity_tail(c: &Controller) -> Option<f64> {
    let g = |w: f64| (c.gd.f.eval(C64::new(0.0, w)) * c.l_u(C64::new(0.0, w))).norm();
    if g(1e5) >= 1.0 - 1e-3 {
        return None;
    }
    let grid = crate::logspace(1e-3, 1e5, 4000);
    Some(grid.iter().rev().find(|&&w| g(w) >= 1.0 - 1e-3).copied().unwrap_or(0.0))
}

/// Box sized 1.2× the largest frequency feature (unity crossing, weight
/// corners, plant poles, E zeros); capped at `cap` when |F L_U| never drops
/// below one.
pub fn default_pole_box(c: &Controller, w: &Weights, cap: f64) -> Result<ContourBox> {
    let mut f = unity_tail(c).unwrap_or(cap).min(cap).max(1.0);
    for z in c.fp.alpha.iter().chain(c.gd.beta.iter()) {
        f = f.max(z.norm());
    }
    for r in [&w.w1, &w.w2] {
        for z in r.zeros().unwrap_or_default().into_iter().chain(r.poles().unwrap_or_default()) {
            f = f.max(z.norm());
        }
    }
    ContourBox::rhp(1.2 * f, 1.2 * f)
}

/// RHP zeros of 1 + m_n F L_U in the box other than those of E and m_d.
pub fn controller_pole_report(c: &Controller, b: &ContourBox, tol: &Tolerances) -> Result<PoleReport> {
    // Axis zeros of E are cancelled on the axis; shift the left edge off it.
    let shifted = ContourBox { re_min: b.re_min.max(1e-6), ..*b };
    let zs = rhp_roots(&|s| characteristic(c, s), &shifted, tol)?;
    let known: Vec<C64> = c.fp.alpha.iter().chain(c.gd.beta.iter().filter(|z| z.re != 0.0)).copied().collect();
    let mut used = vec![false; known.len()];
    let mut poles = Vec::new();
    let mut cancelled = Vec::new();
    for z in zs {
        match (0..known.len()).find(|&k| !used[k] && (known[k] - z).norm() <= 1e-4 * (1.0 + z.norm())) {
            Some(k) => {
                used[k] = true;
                cancelled.push(z);
            }
            None => poles.push(z),
        }
    }
    Ok(PoleReport { count: poles.len(), poles, cancelled, contour: shifted })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub hinf_norm: f64,
    pub rho_target: f64,
    pub cl_stable: bool,
    pub closed_loop_rhp_poles: i64,
    pub controller_rhp_pole_count: usize,
    pub controller_poles: Vec<C64>,
    pub norm_margin: f64,
    pub contour: ContourBox,
    pub pass: bool,
}

/// Norm, controller poles and closed-loop stability of an assembled design.
pub fn verify(c: &Controller, w: &Weights, b: Option<ContourBox>, tol: &Tolerances) -> Result<VerificationReport> {
    let hinf = mixed_sensitivity_norm(&|s| c.loop_gain(s), w)?;
    let b = match b {
        Some(b) => b,
        None => default_pole_box(c, w, 100.0)?,
    };
    let rep = controller_pole_report(c, &b, tol)?;
    let mut indents = c.gd.axis_beta.clone();
    indents.extend(c.gd.axis_beta.iter().map(|x| -x));
    let open = (c.fp.alpha.len() + rep.count) as i64;
    let (stable, z) = closed_loop_stable(&|s| c.loop_gain(s), open, &b, &indents, tol)?;
    let rho = c.gd.level;
    Ok(VerificationReport {
        hinf_norm: hinf,
        rho_target: rho,
        cl_stable: stable,
        closed_loop_rhp_poles: z,
        controller_rhp_pole_count: rep.count,
        controller_poles: rep.poles,
        norm_margin: rho - hinf,
        contour: b,
        pass: hinf <= rho * (1.0 + 1e-3) && stable && rep.count == 0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponse {
    pub label: String,
    pub omegas: Vec<f64>,
    pub values: Vec<C64>,
}

impl FrequencyResponse {
    pub fn sample<F>(label: &str, f: &F, omegas: &[f64]) -> Result<Self>
    where
        F: Fn(C64) -> C64 + Sync,
    {
        if omegas.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Invalid("frequencies must be strictly increasing".into()));
        }
        let values = omegas.par_iter().map(|&w| f(C64::new(0.0, w))).collect();
        Ok(Self { label: label.to_string(), omegas: omegas.to_vec(), values })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "omega,re,im,magnitude,phase_rad")?;
        for (w, v) in self.omegas.iter().zip(&self.values) {
            writeln!(out, "{w:.12e},{:.12e},{:.12e},{:.12e},{:.12e}", v.re, v.im, v.norm(), v.arg())?;
        }
        Ok(())
    }
}

/// S, T, W1·S, W2·T, C and U of a design on the given grid.
pub fn closed_loop_responses(c: &Controller, w: &Weights, omegas: &[f64]) -> Result<Vec<FrequencyResponse>> {
    let s = |x: C64| 1.0 / (1.0 + c.loop_gain(x));
    let t = |x: C64| {
        let l = c.loop_gain(x);
        l / (1.0 + l)
    };
    Ok(vec![
        FrequencyResponse::sample("S", &s, omegas)?,
        FrequencyResponse::sample("T", &t, omegas)?,
        FrequencyResponse::sample("W1S", &|x| w.w1.eval(x) * s(x), omegas)?,
        FrequencyResponse::sample("W2T", &|x| w.w2.eval(x) * t(x), omegas)?,
        FrequencyResponse::sample("C", &|x| c.eval(x), omegas)?,
        FrequencyResponse::sample("U", &|x| c.u.eval(x), omegas)?,
    ])
}
