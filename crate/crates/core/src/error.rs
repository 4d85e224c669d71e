use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("root iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("contour passes through (or too close to) a zero near {near}")]
    ContourThroughZero { near: Complex64 },

    #[error("root count mismatch: winding count {counted}, polished roots {found}")]
    RootCountMismatch { counted: i64, found: usize },

    #[error("assumption A.1({clause}) violated: {message}")]
    AssumptionA1Violation { clause: char, message: String },

    #[error("imaginary-axis zero at {at}")]
    AxisZero { at: Complex64 },

    #[error("leading delay term vanishes identically")]
    DegenerateLeadTerm,

    #[error("classification indeterminate: characteristic root on the unit circle (|r| = {modulus})")]
    Indeterminate { modulus: f64 },

    #[error("inner factor check failed: ||m(jω)| - 1| = {deviation:e} at ω = {omega}")]
    InnerCheckFailed { omega: f64, deviation: f64 },

    #[error("spectral density has an imaginary-axis root at {at}")]
    AxisRoot { at: Complex64 },

    #[error("spectral density cannot be factored: {0}")]
    ImproperDensity(String),

    #[error("interpolation determinant does not change sign on [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("interpolation null space has dimension other than one (singular values {smallest:e}, {second:e})")]
    DegenerateNullspace { smallest: f64, second: f64 },

    #[error("L1(-a) vanishes for a = {a}")]
    L1AtMinusAZero { a: f64 },

    #[error("repeated interpolation point {at} is not supported")]
    UnsupportedMultiplicity { at: Complex64 },

    #[error("zero count keeps growing with the search box ({counts:?})")]
    InfiniteZeros { counts: Vec<i64> },

    #[error("conformal image of {at} is on or too close to the unit circle")]
    DegenerateMap { at: Complex64 },

    #[error("Pick matrix is not positive semi-definite (min eigenvalue {min_eig:e})")]
    PickNotPsd { min_eig: f64 },

    #[error("removable-singularity check failed: {what} residual {residual:e}")]
    CancellationFailure { what: String, residual: f64 },

    #[error("search exhausted without a certified controller:\n{}", .diagnostics.join("\n"))]
    SearchExhausted { diagnostics: Vec<String> },

    #[error("closed loop ill-posed: |1 + PC| = {value:e} at ω = {omega}")]
    IllPosed { omega: f64, value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
