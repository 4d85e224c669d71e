use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every stage of the pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative residual accepted for polynomial roots.
    pub root_residual: f64,
    /// Largest phase increment accepted between contour samples.
    pub phase_step: f64,
    /// Newton iterations when polishing quasi-polynomial roots.
    pub newton_iters: usize,
    /// Maximum bisection depth when refining a contour segment.
    pub contour_depth: usize,
    /// Initial contour sample spacing (rad/s along an edge).
    pub contour_spacing: f64,
    /// Band around the imaginary axis treated as "on the axis".
    pub axis_band: f64,
    /// Band around the unit circle for the F-system test.
    pub unit_circle_band: f64,
    /// Unimodularity tolerance for inner factors.
    pub inner_check: f64,
    /// Tolerance for matching cancelled poles/zeros.
    pub match_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_residual: 1e-9,
            phase_step: std::f64::consts::FRAC_PI_2,
            newton_iters: 50,
            contour_depth: 40,
            contour_spacing: 0.25,
            axis_band: 1e-6,
            unit_circle_band: 1e-8,
            inner_check: 1e-6,
            match_tol: 1e-4,
        }
    }
}

impl Tolerances {
    /// Tighter contour sampling and residuals.
    pub fn strict() -> Self {
        Self {
            root_residual: 1e-11,
            phase_step: std::f64::consts::FRAC_PI_4,
            newton_iters: 100,
            contour_depth: 48,
            contour_spacing: 0.1,
            ..Self::default()
        }
    }

    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            "strict" => Some(Self::strict()),
            _ => None,
        }
    }
}
