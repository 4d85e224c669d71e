//! Batch driver for the design pipeline: JSON configs in, JSON reports and
//! CSV tables out.

pub mod config;
pub mod export;
pub mod pipeline;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use hinf_core::Error;

use config::{DesignConfig, Mode};
use pipeline::DesignReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_ASSUMPTION: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn parse(m: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: m.into() }
    }

    pub fn assumption(m: impl Into<String>) -> Self {
        Self { code: EXIT_ASSUMPTION, message: m.into() }
    }

    pub fn numerical(m: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: m.into() }
    }

    pub fn from_core(e: Error) -> Self {
        let code = match &e {
            Error::AssumptionA1Violation { .. } | Error::AxisZero { .. } | Error::AxisRoot { .. } => EXIT_ASSUMPTION,
            Error::SearchExhausted { .. } => EXIT_EXHAUSTED,
            Error::Invalid(_) => EXIT_PARSE,
            _ => EXIT_NUMERICAL,
        };
        let message = match &e {
            Error::AssumptionA1Violation { clause, message } => format!("A.1({clause}): {message}"),
            Error::AxisZero { .. } | Error::AxisRoot { .. } => format!("A.2: {e}"),
            _ => e.to_string(),
        };
        Self { code, message }
    }

    fn io(e: impl fmt::Display) -> Self {
        Self::numerical(format!("i/o: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Parser, Debug)]
#[command(name = "stabhinf", version, about = "Stable suboptimal H-infinity design for time-delay plants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Tolerance profile: default or strict.
    #[arg(long, global = true)]
    pub tol_profile: Option<String>,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check assumptions A.1–A.4 and classify R and T.
    Check(Common),
    /// Compute γ_opt.
    Gamma(Common),
    /// Run the full pipeline and write the report and data tables.
    Design {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Re-verify a saved design.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Report to verify (default: OUT/report.json).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Frequency responses of a saved design.
    Response {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(CliError::io)?;
    std::fs::write(path, text + "\n").map_err(CliError::io)
}

fn load_report(path: &Path) -> Result<DesignReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("invalid report: {e}")))
}

/// Runs one command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.workers {
        // Ignored if a pool already exists (in-process test runs).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let profile = cli.tol_profile.as_deref();
    match &cli.command {
        Command::Check(c) => {
            let cfg = DesignConfig::load(&c.config)?;
            let tol = cfg.tolerances(profile)?;
            let s = pipeline::setup(&cfg, tol)?;
            std::fs::create_dir_all(&c.out).map_err(CliError::io)?;
            write_json(&c.out.join("assumptions.json"), &s.assumptions)?;
            for (name, ch) in [("A.1", &s.assumptions.a1), ("A.2", &s.assumptions.a2), ("A.3", &s.assumptions.a3), ("A.4", &s.assumptions.a4)] {
                println!("{name} {} {}", if ch.pass { "pass" } else { "FAIL" }, ch.message);
            }
            if let Some(case) = s.assumptions.case {
                println!("case {case:?}");
            }
            match s.assumptions.first_failure() {
                None => Ok(()),
                Some(m) => Err(CliError::assumption(m)),
            }
        }
        Command::Gamma(c) => {
            let cfg = DesignConfig::load(&c.config)?;
            let tol = cfg.tolerances(profile)?;
            let s = pipeline::setup(&cfg, tol)?;
            let g = pipeline::compute_gamma(&cfg, &s)?;
            std::fs::create_dir_all(&c.out).map_err(CliError::io)?;
            write_json(&c.out.join("gamma.json"), &serde_json::json!({ "gamma_opt": g }))?;
            println!("{g:.6}");
            Ok(())
        }
        Command::Design { common: c, mode } => {
            let mut cfg = DesignConfig::load(&c.config)?;
            if let Some(m) = mode {
                cfg.mode = *m;
            }
            let tol = cfg.tolerances(profile)?;
            std::fs::create_dir_all(&c.out).map_err(CliError::io)?;
            match pipeline::design(&cfg, tol.clone()) {
                Ok(d) => {
                    write_json(&c.out.join("report.json"), &d.report)?;
                    let ctl = d.controller.as_ref().unwrap();
                    let e = &cfg.exports;
                    export::write_u_table(&c.out, ctl, e).map_err(CliError::io)?;
                    export::write_nyquist(&c.out, &d, &tol).map_err(CliError::io)?;
                    export::write_feasibility(&c.out, &d, e).map_err(CliError::io)?;
                    let v = d.report.verification.as_ref().unwrap();
                    println!(
                        "route {:?} rho {} norm {:.6} closed-loop stable {} controller RHP poles {}",
                        d.report.route.unwrap(),
                        d.report.rho.unwrap(),
                        v.hinf_norm,
                        v.cl_stable,
                        v.controller_rhp_pole_count
                    );
                    if v.pass {
                        Ok(())
                    } else {
                        Err(CliError::numerical("design did not pass verification"))
                    }
                }
                Err((e, report)) => {
                    if let Some(r) = report {
                        write_json(&c.out.join("report.json"), &r)?;
                    }
                    Err(e)
                }
            }
        }
        Command::Verify { common: c, report } => {
            let cfg = DesignConfig::load(&c.config)?;
            let tol = cfg.tolerances(profile)?;
            let rp = report.clone().unwrap_or_else(|| c.out.join("report.json"));
            let r = load_report(&rp)?;
            let (ctl, w) = pipeline::rebuild(&cfg, &r, tol.clone())?;
            let v = hinf_core::analysis::verify(&ctl, &w, cfg.boxes.verify, &tol).map_err(CliError::from_core)?;
            std::fs::create_dir_all(&c.out).map_err(CliError::io)?;
            write_json(&c.out.join("verification.json"), &v)?;
            println!("norm {:.6} target {} closed-loop stable {} controller RHP poles {} -> {}", v.hinf_norm, v.rho_target, v.cl_stable, v.controller_rhp_pole_count, if v.pass { "pass" } else { "FAIL" });
            if v.pass {
                Ok(())
            } else {
                Err(CliError::numerical("verification failed"))
            }
        }
        Command::Response { common: c, report } => {
            let cfg = DesignConfig::load(&c.config)?;
            let tol = cfg.tolerances(profile)?;
            let rp = report.clone().unwrap_or_else(|| c.out.join("report.json"));
            let r = load_report(&rp)?;
            let (ctl, w) = pipeline::rebuild(&cfg, &r, tol)?;
            std::fs::create_dir_all(&c.out).map_err(CliError::io)?;
            for n in export::write_responses(&c.out, &ctl, &w, &cfg.exports).map_err(CliError::io)? {
                println!("{}", c.out.join(n).display());
            }
            Ok(())
        }
    }
}
