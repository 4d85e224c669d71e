//! Plant ingestion, normalization to a ratio of proper stable delay systems,
//! F-/I-system classification and the inner–outer factorization
//! `P = m_n N_o / m_d`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quasipoly::{
    axis_min, blaschke, common_denominator, default_rhp_box, rhp_roots, stable_count, Delay,
    DelayRational, QuasiPolynomial, RealPolynomial, RationalFunction,
};
use crate::tolerance::Tolerances;

/// `P = r_p / t_p` exactly as given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawPlant {
    pub numerator: QuasiPolynomial,
    pub denominator: QuasiPolynomial,
}

type Terms = Vec<(Delay, RealPolynomial)>;

impl RawPlant {
    /// Builds the plant from raw term lists, checking A.1.
    pub fn from_terms(num: Terms, den: Terms) -> Result<Self> {
        for (name, t) in [("numerator", &num), ("denominator", &den)] {
            if t.is_empty() {
                return Err(Error::Invalid(format!("plant {name} has no terms")));
            }
            if t.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::AssumptionA1Violation {
                    clause: 'b',
                    message: format!("{name} delays are not strictly increasing"),
                });
            }
            if t.iter().any(|(_, p)| p.is_zero()) {
                return Err(Error::AssumptionA1Violation {
                    clause: 'a',
                    message: format!("{name} contains an identically zero polynomial"),
                });
            }
        }
        let p = Self {
            numerator: QuasiPolynomial::new(num)?,
            denominator: QuasiPolynomial::new(den)?,
        };
        p.check_a1()?;
        Ok(p)
    }

    pub fn check_a1(&self) -> Result<()> {
        let h1 = self.numerator.terms()[0].0;
        let tau1 = self.denominator.terms()[0].0;
        if h1 < tau1 {
            return Err(Error::AssumptionA1Violation {
                clause: 'b',
                message: format!("h1 = {h1} is smaller than tau1 = {tau1}"),
            });
        }
        let (hi, di) = dominant(&self.numerator);
        let (tj, dj) = dominant(&self.denominator);
        if di > dj {
            return Err(Error::AssumptionA1Violation {
                clause: 'c',
                message: format!("numerator degree {di} exceeds denominator degree {dj}"),
            });
        }
        if hi < tj {
            return Err(Error::AssumptionA1Violation {
                clause: 'c',
                message: format!("delay {hi} of the dominant numerator term is below {tj}"),
            });
        }
        Ok(())
    }

    pub fn eval(&self, s: C64) -> C64 {
        self.numerator.eval(s) / self.denominator.eval(s)
    }
}

/// Delay and degree of the first term with the largest degree.
fn dominant(q: &QuasiPolynomial) -> (Delay, usize) {
    let d = q.max_degree();
    let (h, _) = q.terms().iter().find(|(_, p)| p.degree() == d).unwrap();
    (*h, d)
}

/// `P = R/T` with every Rᵢ, Tⱼ proper and stable over `(s+1)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedPlant {
    pub raw: RawPlant,
    pub r: DelayRational,
    pub t: DelayRational,
    pub stabilizer: RealPolynomial,
}

pub fn normalize(raw: &RawPlant) -> Result<NormalizedPlant> {
    raw.check_a1()?;
    let d = raw.numerator.max_degree().max(raw.denominator.max_degree());
    let stab = RealPolynomial::new(vec![1.0, 1.0]).pow(d);
    Ok(NormalizedPlant {
        raw: raw.clone(),
        r: DelayRational::new(raw.numerator.clone(), stab.clone())?,
        t: DelayRational::new(raw.denominator.clone(), stab.clone())?,
        stabilizer: stab,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SystemTag {
    FSystem,
    ISystem,
    /// Neither the system nor its conjugate has finitely many RHP zeros.
    Neither,
    /// A root of φ lies on the unit circle.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemClass {
    pub tag: SystemTag,
    pub f_system: bool,
    pub i_system: bool,
    pub phi_roots: Vec<C64>,
    pub xi: Vec<f64>,
}

/// Characteristic data of the φ-test for one delay system.
struct PhiTest {
    finite: Option<bool>,
    roots: Vec<C64>,
    xi: Vec<f64>,
}

fn phi_test(d: &DelayRational, band: f64) -> Result<PhiTest> {
    let terms = d.numerator().terms();
    let (h1, r1) = &terms[0];
    if r1.is_zero() {
        return Err(Error::DegenerateLeadTerm);
    }
    let d1 = r1.degree();
    let n = common_denominator(d.delays());
    let mut xi = Vec::with_capacity(terms.len() - 1);
    let mut coeffs = vec![1.0];
    let mut dominated = false;
    for (h, r) in &terms[1..] {
        let x = match r.degree().cmp(&d1) {
            std::cmp::Ordering::Less => 0.0,
            std::cmp::Ordering::Equal => r.leading() / r1.leading(),
            std::cmp::Ordering::Greater => {
                dominated = true;
                f64::INFINITY
            }
        };
        xi.push(x);
        if x.is_finite() && x != 0.0 {
            let e = h.sub(*h1).scaled_integer(n) as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, 0.0);
            }
            coeffs[e] += x;
        }
    }
    if dominated {
        // A later term outgrows the first: the zero chain runs off to the
        // right, so the system cannot have finitely many RHP zeros.
        return Ok(PhiTest { finite: Some(false), roots: vec![], xi });
    }
    let phi = RealPolynomial::new(coeffs);
    if phi.degree() == 0 {
        return Ok(PhiTest { finite: Some(true), roots: vec![], xi });
    }
    let roots = phi.roots()?;
    let finite = if roots.iter().any(|r| (r.norm() - 1.0).abs() <= band) {
        None
    } else {
        Some(roots.iter().all(|r| r.norm() > 1.0))
    };
    Ok(PhiTest { finite, roots, xi })
}

/// F/I classification via the φ-polynomial test on the system and its
/// conjugate.
pub fn classify(d: &DelayRational, tol: &Tolerances) -> Result<SystemClass> {
    if let Some(w) = axis_zero(d.numerator(), tol) {
        return Err(Error::AxisZero { at: C64::new(0.0, w) });
    }
    let own = phi_test(d, tol.unit_circle_band)?;
    let conj = phi_test(&d.conjugate(), tol.unit_circle_band)?;
    let tag = match (own.finite, conj.finite) {
        (Some(true), _) => SystemTag::FSystem,
        (None, _) => SystemTag::Indeterminate,
        (Some(false), Some(true)) => SystemTag::ISystem,
        (Some(false), None) => SystemTag::Indeterminate,
        (Some(false), Some(false)) => SystemTag::Neither,
    };
    Ok(SystemClass {
        tag,
        f_system: own.finite == Some(true),
        i_system: conj.finite == Some(true),
        phi_roots: own.roots,
        xi: own.xi,
    })
}

/// Frequency of an imaginary-axis zero, if one is found.
pub fn axis_zero(q: &QuasiPolynomial, tol: &Tolerances) -> Option<f64> {
    let bx = default_rhp_box(q.zero_scale(), q.min_delay_gap());
    let wmax = bx.im_max.max(100.0);
    let step = q.min_delay_gap().map_or(0.01, |g| (g / 20.0).min(0.01));
    let f = |s: C64| q.eval(s);
    let scale = |w: f64| {
        let s = C64::new(0.0, w);
        q.terms().iter().map(|(_, p)| p.eval_c(s).norm()).sum::<f64>()
    };
    let (w, v) = axis_min(&f, &scale, wmax, step);
    (v < tol.axis_band).then_some(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorCase {
    /// R is an I-system and T an F-system.
    IF,
    /// R and T are F-systems with h₁ > τ₁.
    FF,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub message: String,
}

impl Check {
    fn ok(m: impl Into<String>) -> Self {
        Self { pass: true, message: m.into() }
    }
    fn fail(m: impl Into<String>) -> Self {
        Self { pass: false, message: m.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub a1: Check,
    pub a2: Check,
    pub a3: Check,
    pub a4: Check,
    pub class_r: Option<SystemClass>,
    pub class_t: Option<SystemClass>,
    pub case: Option<FactorCase>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.a1.pass && self.a2.pass && self.a3.pass && self.a4.pass
    }

    /// First failing assumption as an error.
    pub fn first_failure(&self) -> Option<String> {
        [("A.1", &self.a1), ("A.2", &self.a2), ("A.3", &self.a3), ("A.4", &self.a4)]
            .iter()
            .find(|(_, c)| !c.pass)
            .map(|(n, c)| format!("{n}: {}", c.message))
    }
}

pub fn check_assumptions(plant: &NormalizedPlant, tol: &Tolerances) -> AssumptionReport {
    let a1 = match plant.raw.check_a1() {
        Ok(()) => Check::ok("delays ordered, h1 >= tau1, degree/delay dominance holds"),
        Err(e) => Check::fail(e.to_string()),
    };
    let zr = axis_zero(&plant.raw.numerator, tol);
    let zt = axis_zero(&plant.raw.denominator, tol);
    let a2 = match (zr, zt) {
        (None, None) => Check::ok("no imaginary-axis zeros or poles"),
        (Some(w), _) => Check::fail(format!("imaginary-axis zero at ±{w:.6}j")),
        (_, Some(w)) => Check::fail(format!("imaginary-axis pole at ±{w:.6}j")),
    };
    let class_r = classify(&plant.r, tol).ok();
    let class_t = classify(&plant.t, tol).ok();
    let a3 = match &class_t {
        Some(c) if c.f_system => Check::ok("T is an F-system"),
        Some(c) => Check::fail(format!("T is not an F-system ({:?})", c.tag)),
        None => Check::fail("T could not be classified"),
    };
    let h1 = plant.r.first_delay();
    let tau1 = plant.t.first_delay();
    let case = match (&class_r, &class_t) {
        (Some(r), Some(t)) if r.i_system && t.f_system => Some(FactorCase::IF),
        (Some(r), Some(t)) if r.f_system && t.f_system && h1 > tau1 => Some(FactorCase::FF),
        _ => None,
    };
    let a4 = match case {
        Some(FactorCase::IF) => Check::ok("case (i): R is an I-system, T is an F-system"),
        Some(FactorCase::FF) => Check::ok("case (ii): R, T are F-systems with h1 > tau1"),
        None => match (&class_r, &class_t) {
            (Some(r), Some(t)) if r.f_system && t.f_system => {
                Check::fail("R and T are F-systems but h1 = tau1 (case (ii) needs h1 > tau1)")
            }
            _ => Check::fail("neither factorization case applies"),
        },
    };
    AssumptionReport { a1, a2, a3, a4, class_r, class_t, case }
}

/// `P = m_n N_o / m_d` with structured evaluators.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredPlant {
    pub plant: NormalizedPlant,
    pub case: FactorCase,
    /// ±1 shared by m_n and N_o so that m_n(0) > 0.
    pub sign: f64,
    /// h₁ − τ₁
    pub lag: f64,
    /// Zeros of the finite Blaschke part of m_n (RHP zeros of R̄ or R).
    pub mn_zeros: Vec<C64>,
    /// RHP zeros of T (plant unstable poles αₖ).
    pub alpha: Vec<C64>,
    /// e^{h₁ s} R
    r_adv: DelayRational,
    /// e^{τ₁ s} T
    t_adv: DelayRational,
    /// R̄ in case (i).
    rbar: Option<DelayRational>,
}

impl FactoredPlant {
    pub fn ell(&self) -> usize {
        self.alpha.len()
    }

    /// Unsigned m_n.
    fn mn_raw(&self, s: C64) -> C64 {
        let lag = if self.lag == 0.0 { C64::new(1.0, 0.0) } else { (-s * self.lag).exp() };
        let b = blaschke(&self.mn_zeros, s);
        match &self.rbar {
            Some(rb) => lag * b * self.r_adv.numerator().eval(s) / rb.numerator().eval(s),
            None => lag * b,
        }
    }

    pub fn m_n(&self, s: C64) -> C64 {
        self.sign * self.mn_raw(s)
    }

    pub fn m_d(&self, s: C64) -> C64 {
        blaschke(&self.alpha, s)
    }

    /// m_d as a rational function.
    pub fn m_d_rational(&self) -> RationalFunction {
        let mirror: Vec<C64> = self.alpha.iter().map(|a| -a.conj()).collect();
        RationalFunction {
            num: RealPolynomial::from_roots(&self.alpha, 1.0),
            den: RealPolynomial::from_roots(&mirror, 1.0),
        }
    }

    pub fn n_o(&self, s: C64) -> C64 {
        let outer_r = match &self.rbar {
            Some(rb) => rb.eval(s) / blaschke(&self.mn_zeros, s),
            None => self.r_adv.eval(s) / blaschke(&self.mn_zeros, s),
        };
        self.sign * outer_r * self.m_d(s) / self.t_adv.eval(s)
    }

    pub fn plant(&self, s: C64) -> C64 {
        self.plant.raw.eval(s)
    }
}

/// RHP zeros of a delay system's numerator in an auto-sized box.
pub fn rhp_zeros(d: &DelayRational, tol: &Tolerances) -> Result<Vec<C64>> {
    let q = d.numerator();
    let start = default_rhp_box(q.zero_scale(), q.min_delay_gap());
    let f = |s: C64| q.eval(s);
    let (bx, _) = stable_count(&f, &start, tol)?;
    rhp_roots(&f, &bx, tol)
}

pub fn factorize(plant: &NormalizedPlant, tol: &Tolerances) -> Result<FactoredPlant> {
    let report = check_assumptions(plant, tol);
    if let Some(msg) = report.first_failure() {
        if !report.a1.pass {
            plant.raw.check_a1()?;
        }
        for c in [&report.class_r, &report.class_t].into_iter().flatten() {
            if c.tag == SystemTag::Indeterminate {
                let m = c.phi_roots.iter().map(|r| r.norm()).fold(f64::NAN, |a, b| {
                    if (b - 1.0).abs() < (a - 1.0).abs() || a.is_nan() { b } else { a }
                });
                return Err(Error::Indeterminate { modulus: m });
            }
        }
        return Err(Error::Precondition(msg));
    }
    let case = report.case.expect("A.4 passed");
    let h1 = plant.r.first_delay();
    let tau1 = plant.t.first_delay();
    let r_adv = plant.r.advance(h1)?;
    let t_adv = plant.t.advance(tau1)?;
    let alpha = rhp_zeros(&plant.t, tol)?;
    check_simple(&alpha)?;
    let (mn_zeros, rbar) = match case {
        FactorCase::IF => {
            let rb = plant.r.conjugate();
            (rhp_zeros(&rb, tol)?, Some(rb))
        }
        FactorCase::FF => (rhp_zeros(&plant.r, tol)?, None),
    };
    let mut fp = FactoredPlant {
        plant: plant.clone(),
        case,
        sign: 1.0,
        lag: h1.sub(tau1).to_f64(),
        mn_zeros,
        alpha,
        r_adv,
        t_adv,
        rbar,
    };
    let m0 = fp.mn_raw(C64::new(0.0, 0.0));
    fp.sign = if m0.re < 0.0 { -1.0 } else { 1.0 };
    inner_check(|s| fp.m_n(s), tol.inner_check)?;
    inner_check(|s| fp.m_d(s), tol.inner_check)?;
    Ok(fp)
}

fn check_simple(z: &[C64]) -> Result<()> {
    for (i, a) in z.iter().enumerate() {
        for b in &z[i + 1..] {
            if (a - b).norm() < 1e-6 * (1.0 + a.norm()) {
                return Err(Error::UnsupportedMultiplicity { at: *a });
            }
        }
    }
    Ok(())
}

/// max over a 200-point log grid on [10⁻², 10³] of ||f(jω)| − 1|.
pub fn inner_deviation<F: Fn(C64) -> C64>(f: F) -> (f64, f64) {
    crate::logspace(1e-2, 1e3, 200)
        .into_iter()
        .map(|w| (w, (f(C64::new(0.0, w)).norm() - 1.0).abs()))
        .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a })
}

fn inner_check<F: Fn(C64) -> C64>(f: F, tol: f64) -> Result<()> {
    let (omega, deviation) = inner_deviation(f);
    if deviation > tol {
        return Err(Error::InnerCheckFailed { omega, deviation });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> RealPolynomial {
        RealPolynomial::new(c.to_vec())
    }

    pub(crate) fn ex1() -> RawPlant {
        RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[3.0, 1.0])), (Delay::new(2, 5), p(&[-2.0, 2.0]))],
            vec![
                (Delay::ZERO, p(&[0.0, 0.0, 1.0])),
                (Delay::new(1, 5), p(&[0.0, 1.0])),
                (Delay::new(1, 2), p(&[5.0])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn normalization_uses_common_stabilizer() {
        let n = normalize(&ex1()).unwrap();
        assert_eq!(n.stabilizer.coeffs(), &[1.0, 2.0, 1.0]);
        let s = C64::new(0.3, 2.0);
        assert!((n.r.eval(s) / n.t.eval(s) - ex1().eval(s)).norm() < 1e-12);
    }

    #[test]
    fn classification_of_example() {
        let n = normalize(&ex1()).unwrap();
        let tol = Tolerances::default();
        let ct = classify(&n.t, &tol).unwrap();
        assert_eq!(ct.tag, SystemTag::FSystem);
        assert_eq!(ct.xi, vec![0.0, 0.0]);
        let cr = classify(&n.r, &tol).unwrap();
        assert_eq!(cr.tag, SystemTag::ISystem);
        assert_eq!(cr.xi, vec![2.0]);
        for r in &cr.phi_roots {
            assert!((r.norm() - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn classification_invariant_under_common_factor() {
        let n = normalize(&ex1()).unwrap();
        let tol = Tolerances::default();
        let k = p(&[2.0, 3.0]);
        let scaled = DelayRational::new(n.r.numerator().mul_poly(&k), &n.stabilizer * &p(&[1.0, 0.5])).unwrap();
        assert_eq!(classify(&scaled, &tol).unwrap().tag, classify(&n.r, &tol).unwrap().tag);
    }

    #[test]
    fn single_term_is_f_system() {
        let d = DelayRational::new(QuasiPolynomial::from_poly(p(&[1.0, 1.0])), p(&[2.0, 1.0])).unwrap();
        let c = classify(&d, &Tolerances::default()).unwrap();
        assert_eq!(c.tag, SystemTag::FSystem);
        assert!(c.i_system);
    }

    #[test]
    fn a1_violations() {
        let r = RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[1.0]))],
            vec![(Delay::new(1, 2), p(&[1.0, 1.0])), (Delay::new(1, 5), p(&[1.0]))],
        );
        assert!(matches!(r, Err(Error::AssumptionA1Violation { clause: 'b', .. })));
        // h1 < tau1
        let r = RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[1.0]))],
            vec![(Delay::new(1, 5), p(&[1.0, 1.0]))],
        );
        assert!(matches!(r, Err(Error::AssumptionA1Violation { clause: 'b', .. })));
        let r = RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[1.0])), (Delay::new(1, 1), p(&[1.0, 1.0]))],
            vec![(Delay::new(1, 5), p(&[1.0, 1.0]))],
        );
        assert!(matches!(r, Err(Error::AssumptionA1Violation { clause: 'b', .. })));
        let r = RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[1.0, 0.0, 1.0]))],
            vec![(Delay::ZERO, p(&[1.0, 1.0]))],
        );
        assert!(matches!(r, Err(Error::AssumptionA1Violation { clause: 'c', .. })));
    }

    #[test]
    fn assumptions_of_example() {
        let n = normalize(&ex1()).unwrap();
        let rep = check_assumptions(&n, &Tolerances::default());
        assert!(rep.all_pass(), "{rep:?}");
        assert_eq!(rep.case, Some(FactorCase::IF));
    }

    #[test]
    fn axis_pole_fails_a2() {
        // t_p = s² + 4 has poles at ±2j.
        let raw = RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[1.0]))],
            vec![(Delay::ZERO, p(&[4.0, 0.0, 1.0]))],
        )
        .unwrap();
        let rep = check_assumptions(&normalize(&raw).unwrap(), &Tolerances::default());
        assert!(!rep.a2.pass);
        assert!(rep.a2.message.contains("pole"));
    }

    #[test]
    fn ff_needs_strict_delay_gap() {
        let raw = RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[1.0, 1.0])), (Delay::new(1, 2), p(&[0.5]))],
            vec![(Delay::ZERO, p(&[2.0, 1.0]))],
        )
        .unwrap();
        let rep = check_assumptions(&normalize(&raw).unwrap(), &Tolerances::default());
        assert!(!rep.a4.pass);
        assert!(rep.a4.message.contains("h1 = tau1"), "{rep:?}");

        // Same numerator with the dominant term delayed: R becomes an
        // I-system and case (i) applies.
        let raw = RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[1.0])), (Delay::new(1, 2), p(&[0.5, 1.0]))],
            vec![(Delay::ZERO, p(&[2.0, 1.0]))],
        )
        .unwrap();
        let rep = check_assumptions(&normalize(&raw).unwrap(), &Tolerances::default());
        assert_eq!(rep.case, Some(FactorCase::IF), "{rep:?}");
    }

    #[test]
    fn factorization_of_example() {
        let tol = Tolerances::default();
        let f = factorize(&normalize(&ex1()).unwrap(), &tol).unwrap();
        assert_eq!(f.case, FactorCase::IF);
        assert_eq!(f.mn_zeros.len(), 1);
        assert!((f.mn_zeros[0].re - 0.247).abs() < 5e-3);
        assert_eq!(f.ell(), 2);
        let md = f.m_d_rational();
        for (got, want) in md.num.coeffs().iter().zip([3.79, -0.93, 1.0]) {
            assert!((got - want).abs() < 0.01, "{md:?}");
        }
        for w in crate::logspace(1e-2, 1e3, 200) {
            let s = C64::new(0.0, w);
            let rel = (f.m_n(s) * f.n_o(s) / f.m_d(s) - f.plant(s)).norm() / f.plant(s).norm();
            assert!(rel < 1e-6);
        }
        assert!(f.m_n(C64::new(0.0, 0.0)).re > 0.0);
    }

    #[test]
    fn delay_free_nonminimum_phase() {
        // P = (1 − s)/(s + 2)²: one RHP zero at 1, stable.
        let raw = RawPlant::from_terms(
            vec![(Delay::ZERO, p(&[1.0, -1.0]))],
            vec![(Delay::ZERO, p(&[4.0, 4.0, 1.0]))],
        )
        .unwrap();
        let f = factorize(&normalize(&raw).unwrap(), &Tolerances::default()).unwrap();
        assert_eq!(f.ell(), 0);
        for w in [0.1, 1.0, 7.0] {
            let s = C64::new(0.3, w);
            let b = (s - 1.0) / (s + 1.0);
            assert!((f.m_n(s) - b).norm() < 1e-9 || (f.m_n(s) + b).norm() < 1e-9);
            assert!((f.m_d(s) - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn ff_case_reconstructs() {
        // R = (s+2) e^{−0.3 s} + 0.2 e^{−0.5 s}, T = s − 1 + 0.5e^{−0.1s}
        let raw = RawPlant::from_terms(
            vec![(Delay::new(3, 10), p(&[2.0, 1.0])), (Delay::new(1, 2), p(&[0.2]))],
            vec![(Delay::ZERO, p(&[-1.0, 1.0])), (Delay::new(1, 10), p(&[0.5]))],
        )
        .unwrap();
        let n = normalize(&raw).unwrap();
        let rep = check_assumptions(&n, &Tolerances::default());
        assert!(rep.all_pass(), "{rep:?}");
        let f = factorize(&n, &Tolerances::default()).unwrap();
        for w in crate::logspace(1e-2, 1e3, 50) {
            let s = C64::new(0.0, w);
            let rel = (f.m_n(s) * f.n_o(s) / f.m_d(s) - f.plant(s)).norm() / f.plant(s).norm();
            assert!(rel < 1e-6, "{rel}");
        }
        assert_eq!(f.ell(), 1);
    }
}
