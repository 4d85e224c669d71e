use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use hinf_core::analysis::{closed_loop_responses, FrequencyResponse};
use hinf_core::quasipoly::nyquist_path;
use hinf_core::stabfin::q_scan;
use hinf_core::stabinf::{l1u_stable, objective};
use hinf_core::synthesis::{infinite_pole_test, Controller, FirstOrderU, Weights};
use hinf_core::{logspace, Tolerances, C64};
use rayon::prelude::*;

use crate::config::ExportConfig;
use crate::pipeline::Design;

fn create(dir: &Path, name: &str) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn write_response(dir: &Path, name: &str, fr: &FrequencyResponse) -> std::io::Result<()> {
    let mut f = create(dir, name)?;
    fr.write_csv(&mut f)?;
    f.flush()
}

fn grid(e: &ExportConfig) -> Vec<f64> {
    logspace(e.omega_min, e.omega_max, e.points.max(2))
}

/// |U(jω)| table.
pub fn write_u_table(dir: &Path, c: &Controller, e: &ExportConfig) -> anyhow::Result<()> {
    let fr = FrequencyResponse::sample("U", &|s| c.u.eval(s), &grid(e))?;
    write_response(dir, "u_response.csv", &fr)?;
    Ok(())
}

fn write_path(dir: &Path, pts: &[(C64, C64)]) -> std::io::Result<()> {
    let mut f = create(dir, "nyquist.csv")?;
    writeln!(f, "s_re,s_im,re,im")?;
    for (s, v) in pts {
        writeln!(f, "{:.12e},{:.12e},{:.12e},{:.12e}", s.re, s.im, v.re, v.im)?;
    }
    f.flush()
}

/// Nyquist path: the certificate path of m_n F L_U on the infinite-pole
/// route, the loop gain PC over the verification box otherwise.
pub fn write_nyquist(dir: &Path, d: &Design, tol: &Tolerances) -> anyhow::Result<()> {
    if let Some((r, _, _)) = &d.inf {
        write_path(dir, &r.nyquist)?;
        return Ok(());
    }
    let c = d.controller.as_ref().expect("design has a controller");
    let v = d.report.verification.as_ref().expect("design was verified");
    let mut ind = c.gd.axis_beta.clone();
    ind.extend(c.gd.axis_beta.iter().map(|x| -x));
    let (_, pts) = nyquist_path(&|s| c.loop_gain(s), &v.contour, &ind, tol)?;
    write_path(dir, &pts)?;
    Ok(())
}

/// Feasibility region: constant-U scan (u∞, admissible, L1U stable,
/// ω_max, η_max) or constant-Q scan per μ (μ, q, max|U|, feasible).
pub fn write_feasibility(dir: &Path, d: &Design, e: &ExportConfig) -> anyhow::Result<()> {
    let mut f = create(dir, "feasibility.csv")?;
    if let Some((_, gd, l)) = &d.inf {
        writeln!(f, "u_inf,finite_poles,l1u_stable,omega_max,eta_max")?;
        let rows: Vec<String> = (0..=400)
            .into_par_iter()
            .map(|i| {
                let u = FirstOrderU::constant(-1.0 + i as f64 * 0.005);
                let (w, eta) = objective(&u, gd, l);
                format!(
                    "{:.3},{},{},{:.12e},{:.12e}",
                    u.u_inf,
                    !infinite_pole_test(gd, l, &u),
                    l1u_stable(l, &u),
                    w,
                    eta
                )
            })
            .collect();
        for r in rows {
            writeln!(f, "{r}")?;
        }
    } else if let Some((cert, pp, Some(dd))) = &d.fin {
        writeln!(f, "mu,q,max_ratio,feasible")?;
        let mut mus = e.window_mus.clone();
        mus.push(cert.mu);
        mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        mus.dedup();
        let step = 0.01;
        for mu in mus {
            if cert.mu_opt.is_some_and(|m| mu <= m) {
                continue;
            }
            for (q, r) in q_scan(dd, pp, mu, step) {
                match r {
                    Ok(m) => writeln!(f, "{mu},{q:.2},{m:.12e},{}", m <= 1.0)?,
                    Err(_) => writeln!(f, "{mu},{q:.2},nan,false")?,
                }
            }
        }
    } else {
        writeln!(f, "note")?;
        writeln!(f, "U = 0 certificate; no search region")?;
    }
    f.flush()?;
    Ok(())
}

/// S, T, W1S, W2T, C and U responses as one CSV each.
pub fn write_responses(dir: &Path, c: &Controller, w: &Weights, e: &ExportConfig) -> anyhow::Result<Vec<String>> {
    let mut names = Vec::new();
    for fr in closed_loop_responses(c, w, &grid(e))? {
        let name = format!("response_{}.csv", fr.label.to_lowercase());
        write_response(dir, &name, &fr)?;
        names.push(name);
    }
    Ok(names)
}
