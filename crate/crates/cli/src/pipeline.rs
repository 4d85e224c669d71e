use std::time::Instant;

use hinf_core::analysis::{verify, VerificationReport};
use hinf_core::plantmodel::{check_assumptions, factorize, normalize, AssumptionReport, FactoredPlant};
use hinf_core::stabfin::{search_fin, DiskData, FinCertificate, FinU, NpInterpolant, P1P2};
use hinf_core::stabinf::{search, AsymptoticData, IntervalSet, StabSearchResult};
use hinf_core::synthesis::{
    assemble, default_bracket, gamma_opt, infinite_pole_test, relative_degree_route, solve_l, Controller,
    ControllerL, FirstOrderU, GammaData, LMode, Route, UParam, Weights,
};
use hinf_core::{Error, Tolerances};
use serde::{Deserialize, Serialize};

use crate::config::{DesignConfig, Mode};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RouteTaken {
    #[serde(rename = "INF")]
    Inf,
    #[serde(rename = "FIN")]
    Fin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route")]
pub enum Certificate {
    #[serde(rename = "INF")]
    Inf { result: StabSearchResult, asymptotics: AsymptoticData, admissible: IntervalSet },
    #[serde(rename = "FIN")]
    Fin { result: FinRecord },
}

/// Serializable part of a finite-pole certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinRecord {
    pub mu: f64,
    pub q: Option<FirstOrderU>,
    pub max_ratio: f64,
    pub stable: bool,
    pub mu_opt: Option<f64>,
    pub p: Vec<hinf_core::C64>,
    pub szeros: Vec<hinf_core::C64>,
    pub contour: hinf_core::quasipoly::ContourBox,
    pub disk: Option<DiskData>,
    pub interpolant: Option<NpInterpolant>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub assumptions: AssumptionReport,
    pub gamma_opt: Option<f64>,
    pub rho: Option<f64>,
    pub route: Option<RouteTaken>,
    pub l: Option<ControllerL>,
    pub certificate: Option<Certificate>,
    pub verification: Option<VerificationReport>,
    pub diagnostics: Vec<String>,
    pub timing: Timing,
}

impl DesignReport {
    /// Report with the timing field cleared, for determinism checks.
    pub fn without_timing(&self) -> Self {
        Self { timing: Timing::default(), ..self.clone() }
    }
}

/// Plant, weights and tolerances resolved from a config.
pub struct Setup {
    pub weights: Weights,
    pub tol: Tolerances,
    pub assumptions: AssumptionReport,
    pub factored: Option<FactoredPlant>,
}

pub fn setup(cfg: &DesignConfig, tol: Tolerances) -> Result<Setup, CliError> {
    let weights = cfg.weights()?;
    let raw = cfg.raw_plant()?;
    let plant = normalize(&raw).map_err(CliError::from_core)?;
    let assumptions = check_assumptions(&plant, &tol);
    let factored = if assumptions.all_pass() {
        Some(factorize(&plant, &tol).map_err(CliError::from_core)?)
    } else {
        None
    };
    Ok(Setup { weights, tol, assumptions, factored })
}

pub fn compute_gamma(cfg: &DesignConfig, s: &Setup) -> Result<f64, CliError> {
    let fp = s.factored.as_ref().ok_or_else(|| assumption_error(&s.assumptions))?;
    let bracket = cfg.search.gamma_bracket.unwrap_or_else(|| default_bracket(&s.weights));
    gamma_opt(fp, &s.weights, bracket).map_err(CliError::from_core)
}

fn assumption_error(a: &AssumptionReport) -> CliError {
    CliError::assumption(a.first_failure().unwrap_or_else(|| "assumption check failed".into()))
}

/// Route for AUTO mode: finite-pole search when the weights force it, or
/// when the central controller at the first level has finitely many RHP
/// poles and F is strictly proper.
pub fn choose_route(cfg: &DesignConfig, fp: &FactoredPlant, w: &Weights) -> RouteTaken {
    match cfg.mode {
        Mode::Inf => RouteTaken::Inf,
        Mode::Fin => RouteTaken::Fin,
        Mode::Auto => {
            if relative_degree_route(w) == Route::FiniteCase {
                return RouteTaken::Fin;
            }
            let rho = cfg.rho_schedule[0];
            let finite = GammaData::new(rho, w)
                .ok()
                .and_then(|gd| {
                    let l = solve_l(fp, &gd, LMode::Suboptimal, cfg.search.inf.extra_point).ok()?;
                    Some(gd.f.relative_degree() >= 1 && !infinite_pole_test(&gd, &l, &FirstOrderU::constant(0.0)))
                })
                .unwrap_or(false);
            if finite {
                RouteTaken::Fin
            } else {
                RouteTaken::Inf
            }
        }
    }
}

/// Design outcome with the live controller kept for exports.
pub struct Design {
    pub report: DesignReport,
    pub controller: Option<Controller>,
    pub inf: Option<(StabSearchResult, GammaData, ControllerL)>,
    pub fin: Option<(FinCertificate, P1P2, Option<DiskData>)>,
}

pub fn design(cfg: &DesignConfig, tol: Tolerances) -> Result<Design, (CliError, Option<DesignReport>)> {
    let t0 = Instant::now();
    let s = setup(cfg, tol).map_err(|e| (e, None))?;
    let mut report = DesignReport {
        assumptions: s.assumptions.clone(),
        gamma_opt: None,
        rho: None,
        route: None,
        l: None,
        certificate: None,
        verification: None,
        diagnostics: vec![],
        timing: Timing::default(),
    };
    let fail = |e: CliError, mut r: DesignReport| {
        r.timing.seconds = t0.elapsed().as_secs_f64();
        Err((e, Some(r)))
    };
    let Some(fp) = s.factored.clone() else {
        return fail(assumption_error(&s.assumptions), report);
    };
    let g = match compute_gamma(cfg, &s) {
        Ok(g) => g,
        Err(e) => return fail(e, report),
    };
    report.gamma_opt = Some(g);
    let route = choose_route(cfg, &fp, &s.weights);
    report.route = Some(route);
    let mut out = Design { report, controller: None, inf: None, fin: None };
    let verify_box = cfg.boxes.verify;
    match route {
        RouteTaken::Inf => match search(&cfg.rho_schedule, g, &fp, &s.weights, &cfg.search.inf, &s.tol) {
            Ok((r, level)) => {
                let c = assemble(&fp, &level.gd, &level.l, UParam::First(r.u));
                out.report.rho = Some(level.gd.level);
                out.report.l = Some(level.l.clone());
                out.report.certificate = Some(Certificate::Inf {
                    result: r.clone(),
                    asymptotics: level.asymptotics,
                    admissible: level.admissible.clone(),
                });
                out.controller = Some(c);
                out.inf = Some((r, level.gd, level.l));
            }
            Err(e) => {
                if let Error::SearchExhausted { diagnostics } = &e {
                    out.report.diagnostics = diagnostics.clone();
                }
                return fail(CliError::from_core(e), out.report);
            }
        },
        RouteTaken::Fin => match search_fin(&cfg.rho_schedule, g, &fp, &s.weights, &cfg.search.fin, &s.tol) {
            Ok((cert, level)) => {
                let c = assemble(&fp, level.pp.gamma_data(), level.pp.l(), cert.u_param());
                out.report.rho = Some(cert.rho);
                out.report.l = Some(level.pp.l().clone());
                out.report.certificate = Some(Certificate::Fin {
                    result: FinRecord {
                        mu: cert.mu,
                        q: cert.q,
                        max_ratio: cert.max_ratio,
                        stable: cert.stable,
                        mu_opt: cert.mu_opt,
                        p: cert.p.clone(),
                        szeros: cert.szeros.clone(),
                        contour: level.pp.contour,
                        disk: level.dd.clone(),
                        interpolant: cert.u.as_ref().map(|u| u.np.clone()),
                    },
                });
                out.controller = Some(c);
                out.fin = Some((cert, level.pp, level.dd));
            }
            Err(e) => {
                if let Error::SearchExhausted { diagnostics } = &e {
                    out.report.diagnostics = diagnostics.clone();
                }
                return fail(CliError::from_core(e), out.report);
            }
        },
    }
    let c = out.controller.as_ref().unwrap();
    match verify(c, &s.weights, verify_box, &s.tol) {
        Ok(v) => out.report.verification = Some(v),
        Err(e) => {
            out.report.diagnostics.push(format!("verification: {e}"));
            return fail(CliError::from_core(e), out.report);
        }
    }
    out.report.timing.seconds = t0.elapsed().as_secs_f64();
    Ok(out)
}

/// Controller rebuilt from a config and a saved report.
pub fn rebuild(cfg: &DesignConfig, report: &DesignReport, tol: Tolerances) -> Result<(Controller, Weights), CliError> {
    let s = setup(cfg, tol)?;
    let fp = s.factored.ok_or_else(|| assumption_error(&s.assumptions))?;
    let (Some(rho), Some(l), Some(cert)) = (report.rho, &report.l, &report.certificate) else {
        return Err(CliError::parse("report carries no certificate"));
    };
    let gd = GammaData::new(rho, &s.weights).map_err(CliError::from_core)?;
    let u = match cert {
        Certificate::Inf { result, .. } => UParam::First(result.u),
        Certificate::Fin { result } => match (&result.disk, &result.interpolant) {
            (Some(dd), Some(np)) => {
                let pp = P1P2::from_known(&fp, &gd, l, result.p.clone(), result.szeros.clone(), result.contour);
                FinU { np: np.clone(), dd: dd.clone(), pp }.to_uparam()
            }
            _ => UParam::zero(),
        },
    };
    Ok((assemble(&fp, &gd, l, u), s.weights))
}
