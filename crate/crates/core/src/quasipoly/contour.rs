use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Rectangle [re_min, re_max] × [im_min, im_max]; imaginary-axis points on
/// the left edge may be skirted by semicircles of `indent_radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub indent_radius: f64,
}

impl ContourBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let b = Self { re_min, re_max, im_min, im_max, indent_radius: 1e-3 };
        b.validate()?;
        Ok(b)
    }

    pub fn with_indent(mut self, r: f64) -> Result<Self> {
        self.indent_radius = r;
        self.validate()?;
        Ok(self)
    }

    /// Right-half-plane box [0, re_max] × [−im_max, im_max].
    pub fn rhp(re_max: f64, im_max: f64) -> Result<Self> {
        Self::new(0.0, re_max, -im_max, im_max)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.re_min >= 0.0
            && self.re_max > self.re_min
            && self.im_max > self.im_min
            && self.indent_radius > 0.0
            && self.indent_radius < (self.im_max - self.im_min) / 4.0
            && [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("bad contour box {self:?}")))
        }
    }

    pub fn contains(&self, s: C64, margin: f64) -> bool {
        s.re >= self.re_min - margin
            && s.re <= self.re_max + margin
            && s.im >= self.im_min - margin
            && s.im <= self.im_max + margin
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn scaled(&self, re_factor: f64, im_factor: f64) -> Self {
        Self {
            re_max: self.re_min + (self.re_max - self.re_min) * re_factor,
            im_min: self.im_min * im_factor,
            im_max: self.im_max * im_factor,
            ..*self
        }
    }
}

/// Default box for "finitely many RHP zeros" checks.
///
/// `scale` bounds the zero magnitudes of the leading structure and
/// `delay_gap` is the smallest positive delay difference, which sets the
/// period of any root chain.
pub fn default_rhp_box(scale: f64, delay_gap: Option<f64>) -> ContourBox {
    let re = 1.0 + scale;
    let base = 2.0 * (1.0 + scale);
    let w = match delay_gap {
        Some(g) if g > 0.0 => (20.0 * PI / g).max(base),
        _ => base,
    };
    ContourBox::rhp(re, w).expect("default box is valid")
}

#[derive(Clone, Copy, Debug)]
enum Segment {
    Line(C64, C64),
    /// Center, radius, start and end angle.
    Arc(C64, f64, f64, f64),
}

impl Segment {
    fn at(&self, t: f64) -> C64 {
        match *self {
            Segment::Line(a, b) => a + (b - a) * t,
            Segment::Arc(c, r, t0, t1) => c + C64::from_polar(r, t0 + (t1 - t0) * t),
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Segment::Line(a, b) => (b - a).norm(),
            Segment::Arc(_, r, t0, t1) => r * (t1 - t0).abs(),
        }
    }
}

/// Positively oriented boundary. Indentations bulge into the box, so the
/// skirted axis points lie outside the enclosed region.
fn path(b: &ContourBox, indents: &[f64]) -> Vec<Segment> {
    let c = |x: f64, y: f64| C64::new(x, y);
    let mut segs = vec![
        Segment::Line(c(b.re_min, b.im_min), c(b.re_max, b.im_min)),
        Segment::Line(c(b.re_max, b.im_min), c(b.re_max, b.im_max)),
        Segment::Line(c(b.re_max, b.im_max), c(b.re_min, b.im_max)),
    ];
    let r = b.indent_radius;
    let mut pts: Vec<f64> = indents
        .iter()
        .copied()
        .filter(|&y| y - r > b.im_min && y + r < b.im_max)
        .collect();
    pts.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let mut y = b.im_max;
    for p in pts {
        if p + r < y {
            segs.push(Segment::Line(c(b.re_min, y), c(b.re_min, p + r)));
        }
        segs.push(Segment::Arc(c(b.re_min, p), r, FRAC_PI_2, -FRAC_PI_2));
        y = p - r;
    }
    segs.push(Segment::Line(c(b.re_min, y), c(b.re_min, b.im_min)));
    segs
}

struct Tracer<'a, F> {
    f: &'a F,
    step: f64,
    depth: usize,
}

impl<F: Fn(C64) -> C64 + Sync> Tracer<'_, F> {
    fn value(&self, s: C64) -> Result<C64> {
        let v = (self.f)(s);
        if !v.is_finite() || v.norm() == 0.0 {
            return Err(Error::ContourThroughZero { near: s });
        }
        Ok(v)
    }

    /// Accumulated phase along one segment; optionally records samples.
    fn segment(&self, seg: &Segment, spacing: f64, out: Option<&mut Vec<(C64, C64)>>) -> Result<f64> {
        let n = ((seg.length() / spacing).ceil() as usize).max(8);
        let mut sink = out;
        let mut t0 = 0.0;
        let mut f0 = self.value(seg.at(0.0))?;
        if let Some(o) = sink.as_deref_mut() {
            o.push((seg.at(0.0), f0));
        }
        let mut phase = 0.0;
        for k in 1..=n {
            let t1 = k as f64 / n as f64;
            let f1 = self.value(seg.at(t1))?;
            phase += self.refine(seg, t0, f0, t1, f1, 0, sink.as_deref_mut())?;
            t0 = t1;
            f0 = f1;
        }
        Ok(phase)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        seg: &Segment,
        ta: f64,
        fa: C64,
        tb: f64,
        fb: C64,
        depth: usize,
        mut out: Option<&mut Vec<(C64, C64)>>,
    ) -> Result<f64> {
        let d = (fb / fa).arg();
        if d.abs() < self.step {
            if let Some(o) = out {
                o.push((seg.at(tb), fb));
            }
            return Ok(d);
        }
        if depth >= self.depth {
            return Err(Error::ContourThroughZero { near: seg.at(0.5 * (ta + tb)) });
        }
        let tm = 0.5 * (ta + tb);
        let fm = self.value(seg.at(tm))?;
        let left = self.refine(seg, ta, fa, tm, fm, depth + 1, out.as_deref_mut())?;
        let right = self.refine(seg, tm, fm, tb, fb, depth + 1, out)?;
        Ok(left + right)
    }
}

/// Zeros minus poles of `f` inside `b`, by the argument principle.
///
/// `indents` are imaginary parts of left-edge points to skirt.
pub fn winding_count<F>(f: &F, b: &ContourBox, indents: &[f64], tol: &Tolerances) -> Result<i64>
where
    F: Fn(C64) -> C64 + Sync,
{
    b.validate()?;
    let tr = Tracer { f, step: tol.phase_step, depth: tol.contour_depth };
    let segs = path(b, indents);
    let total: f64 = segs
        .par_iter()
        .map(|s| tr.segment(s, tol.contour_spacing, None))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    let w = total / (2.0 * PI);
    Ok(w.round() as i64)
}

/// Winding number of `f` around `−1` (i.e. of `1 + f` around 0) together
/// with the sampled path values of `f`.
pub fn nyquist_path<F>(
    f: &F,
    b: &ContourBox,
    indents: &[f64],
    tol: &Tolerances,
) -> Result<(i64, Vec<(C64, C64)>)>
where
    F: Fn(C64) -> C64 + Sync,
{
    b.validate()?;
    let g = |s: C64| 1.0 + f(s);
    let tr = Tracer { f: &g, step: tol.phase_step, depth: tol.contour_depth };
    let mut samples = Vec::new();
    let mut total = 0.0;
    for s in path(b, indents) {
        total += tr.segment(&s, tol.contour_spacing, Some(&mut samples))?;
    }
    let pts = samples.into_iter().map(|(s, v)| (s, v - 1.0)).collect();
    Ok(((total / (2.0 * PI)).round() as i64, pts))
}

/// Newton iteration with a central-difference derivative.
pub fn newton<F: Fn(C64) -> C64>(f: &F, z0: C64, iters: usize) -> Option<C64> {
    let mut z = z0;
    for _ in 0..iters {
        let h = 1e-6 * (1.0 + z.norm());
        let fz = f(z);
        if fz.norm() == 0.0 {
            return Some(z);
        }
        let d = (f(z + h) - f(z - h)) / (2.0 * h);
        let step = fz / d;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    let h = 1e-6 * (1.0 + z.norm());
    let d = (f(z + h) - f(z - h)) / (2.0 * h);
    ((f(z) / d).norm() <= 1e-10 * (1.0 + z.norm())).then_some(z)
}

/// Local magnitude scale of `f` near `z` (max over a small ring).
pub fn local_scale<F: Fn(C64) -> C64>(f: &F, z: C64) -> f64 {
    let r = 1e-2 * (1.0 + z.norm());
    (0..8)
        .map(|k| f(z + C64::from_polar(r, PI * k as f64 / 4.0)).norm())
        .fold(0.0, f64::max)
}

const SPLITS: [f64; 5] = [0.5, 0.4713, 0.5387, 0.4129, 0.5871];

/// Zeros of `f` (assumed pole-free) inside `b`: subdivide until each box
/// holds a single zero, then polish by Newton.
pub fn rhp_roots<F>(f: &F, b: &ContourBox, tol: &Tolerances) -> Result<Vec<C64>>
where
    F: Fn(C64) -> C64 + Sync,
{
    let n = winding_count(f, b, &[], tol)?;
    let mut roots = roots_in(f, b, n, tol, 0)?;
    if roots.len() as i64 != n {
        return Err(Error::RootCountMismatch { counted: n, found: roots.len() });
    }
    for z in &roots {
        let sc = local_scale(f, *z);
        if f(*z).norm() > 1e-8 * sc.max(f64::MIN_POSITIVE) {
            return Err(Error::NonConvergence { iterations: tol.newton_iters });
        }
    }
    pair_conjugates(&mut roots);
    crate::sort_complex(&mut roots);
    Ok(roots)
}

fn roots_in<F>(f: &F, b: &ContourBox, n: i64, tol: &Tolerances, depth: usize) -> Result<Vec<C64>>
where
    F: Fn(C64) -> C64 + Sync,
{
    if n <= 0 {
        return Ok(vec![]);
    }
    let w = b.re_max - b.re_min;
    let h = b.im_max - b.im_min;
    let size = w.max(h);
    if n == 1 {
        if let Some(z) = newton(f, b.center(), tol.newton_iters) {
            if b.contains(z, 1e-12 * (1.0 + z.norm())) {
                return Ok(vec![z]);
            }
        }
    }
    if depth > 60 || size < 1e-9 * (1.0 + b.center().norm()) {
        // Clustered or multiple zero.
        let z = newton(f, b.center(), tol.newton_iters).unwrap_or(b.center());
        return Ok(vec![z; n as usize]);
    }
    let mut last = None;
    for frac in SPLITS {
        let (b1, b2) = split(b, frac, w >= h);
        let counts = (|| -> Result<(i64, i64)> {
            let (c1, c2) = rayon::join(
                || winding_count(f, &b1, &[], tol),
                || winding_count(f, &b2, &[], tol),
            );
            Ok((c1?, c2?))
        })();
        match counts {
            Ok((c1, c2)) => {
                if c1 + c2 != n || c1 < 0 || c2 < 0 {
                    return Err(Error::RootCountMismatch { counted: n, found: (c1 + c2).max(0) as usize });
                }
                let (r1, r2) = rayon::join(
                    || roots_in(f, &b1, c1, tol, depth + 1),
                    || roots_in(f, &b2, c2, tol, depth + 1),
                );
                let mut r = r1?;
                r.extend(r2?);
                return Ok(r);
            }
            Err(e @ Error::ContourThroughZero { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn split(b: &ContourBox, frac: f64, vertical_cut: bool) -> (ContourBox, ContourBox) {
    let r = b.indent_radius;
    let mk = |re_min, re_max, im_min, im_max| {
        let mut c = ContourBox { re_min, re_max, im_min, im_max, indent_radius: r };
        c.indent_radius = r.min((c.im_max - c.im_min) / 8.0);
        c
    };
    if vertical_cut {
        let x = b.re_min + frac * (b.re_max - b.re_min);
        (mk(b.re_min, x, b.im_min, b.im_max), mk(x, b.re_max, b.im_min, b.im_max))
    } else {
        let y = b.im_min + frac * (b.im_max - b.im_min);
        (mk(b.re_min, b.re_max, b.im_min, y), mk(b.re_min, b.re_max, y, b.im_max))
    }
}

fn pair_conjugates(z: &mut [C64]) {
    let n = z.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let tol = 1e-8 * (1.0 + z[i].norm());
        if z[i].im.abs() <= tol {
            z[i].im = 0.0;
            continue;
        }
        if let Some(j) = (0..n).find(|&j| !used[j] && (z[j] - z[i].conj()).norm() <= 1e-6 * (1.0 + z[i].norm())) {
            used[j] = true;
            let m = 0.5 * (z[i] + z[j].conj());
            z[i] = m;
            z[j] = m.conj();
        }
    }
}

/// Count zeros in a box that is enlarged until the count stabilizes.
pub fn stable_count<F>(f: &F, start: &ContourBox, tol: &Tolerances) -> Result<(ContourBox, i64)>
where
    F: Fn(C64) -> C64 + Sync,
{
    let mut b = *start;
    let mut counts = vec![winding_count(f, &b, &[], tol)?];
    for _ in 0..3 {
        let bigger = b.scaled(2.0, 2.0);
        let c = winding_count(f, &bigger, &[], tol)?;
        counts.push(c);
        if c == counts[counts.len() - 2] {
            return Ok((b, c));
        }
        b = bigger;
    }
    Err(Error::InfiniteZeros { counts })
}

/// Smallest value of |f(jω)|/scale(ω) for ω ∈ [0, omega_max], found on a
/// uniform grid and polished by golden-section search at local minima.
/// Returns (ω, ratio).
pub fn axis_min<F, S>(f: &F, scale: &S, omega_max: f64, step: f64) -> (f64, f64)
where
    F: Fn(C64) -> C64 + Sync,
    S: Fn(f64) -> f64 + Sync,
{
    let ratio = |w: f64| f(C64::new(0.0, w)).norm() / scale(w).max(f64::MIN_POSITIVE);
    let n = ((omega_max / step).ceil() as usize).max(16);
    let grid: Vec<f64> = (0..=n).map(|k| omega_max * k as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.par_iter().map(|&w| ratio(w)).collect();
    let mut best = (0.0, f64::INFINITY);
    for k in 0..=n {
        let left = if k == 0 { f64::INFINITY } else { vals[k - 1] };
        let right = if k == n { f64::INFINITY } else { vals[k + 1] };
        if vals[k] <= left && vals[k] <= right {
            let lo = grid[k.saturating_sub(1)];
            let hi = grid[(k + 1).min(n)];
            let (w, v) = golden_min(&ratio, lo, hi, 60);
            let (w, v) = if vals[k] < v { (grid[k], vals[k]) } else { (w, v) };
            if v < best.1 {
                best = (w, v);
            }
        }
    }
    best
}

/// Golden-section minimization of a unimodal function on [lo, hi].
pub fn golden_min<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        }
    }
    if f1 <= f2 { (x1, f1) } else { (x2, f2) }
}
