use std::path::Path;

use hinf_core::plantmodel::RawPlant;
use hinf_core::quasipoly::{ContourBox, Delay, RationalFunction, RealPolynomial};
use hinf_core::stabfin::FinSearchOptions;
use hinf_core::stabinf::InfSearchOptions;
use hinf_core::synthesis::Weights;
use hinf_core::Tolerances;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Auto,
    Inf,
    Fin,
}

/// Plant terms as given: `[[delay, [c0, c1, ...]], ...]` with delays as
/// exact "num/den" strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub numerator: Vec<(Delay, RealPolynomial)>,
    pub denominator: Vec<(Delay, RealPolynomial)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsSpec {
    pub w1: RationalFunction,
    pub w2: RationalFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct SearchConfig {
    pub gamma_bracket: Option<(f64, f64)>,
    pub inf: InfSearchOptions,
    pub fin: FinSearchOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct BoxOverrides {
    /// Box for controller-pole and closed-loop checks.
    pub verify: Option<ContourBox>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExportConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    /// μ values for the constant-Q feasibility table (finite-pole route).
    pub window_mus: Vec<f64>,
}

impl Default for ExportConfig {
    fn default() -> Self {
        Self { omega_min: 1e-2, omega_max: 1e3, points: 500, window_mus: vec![20.0, 50.0, 100.0, 200.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub plant: PlantSpec,
    pub weights: WeightsSpec,
    pub rho_schedule: Vec<f64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub boxes: BoxOverrides,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub exports: ExportConfig,
}

impl DesignConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let c: Self = serde_json::from_str(text).map_err(|e| CliError::parse(format!("invalid config: {e}")))?;
        if c.rho_schedule.is_empty() || c.rho_schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::parse("rho_schedule must be non-empty and strictly increasing"));
        }
        if c.rho_schedule.iter().any(|r| !(*r > 0.0)) {
            return Err(CliError::parse("rho_schedule entries must be positive"));
        }
        Ok(c)
    }

    /// Plant with A.1 enforced; violations are assumption failures.
    pub fn raw_plant(&self) -> Result<RawPlant, CliError> {
        RawPlant::from_terms(self.plant.numerator.clone(), self.plant.denominator.clone()).map_err(CliError::from_core)
    }

    pub fn weights(&self) -> Result<Weights, CliError> {
        let mk = |r: &RationalFunction| RationalFunction::new(r.num.clone(), r.den.clone());
        let w1 = mk(&self.weights.w1).map_err(|e| CliError::parse(format!("W1: {e}")))?;
        let w2 = mk(&self.weights.w2).map_err(|e| CliError::parse(format!("W2: {e}")))?;
        Weights::new(w1, w2).map_err(|e| CliError::parse(format!("weights: {e}")))
    }

    pub fn tolerances(&self, profile: Option<&str>) -> Result<Tolerances, CliError> {
        match profile {
            Some(p) => Tolerances::profile(p).ok_or_else(|| CliError::parse(format!("unknown tolerance profile {p:?}"))),
            None => Ok(self.tolerances.clone().unwrap_or_default()),
        }
    }
}
