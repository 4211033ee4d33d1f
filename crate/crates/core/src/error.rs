use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("m must be odd (got m = {0}); even harmonics break trajectory closure")]
    EvenHarmonic(u32),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("step count must be even for composite Simpson quadrature (got {0})")]
    OddSteps(usize),

    #[error("at least {min} quadrature steps required (got {got})")]
    TooFewSteps { got: usize, min: usize },

    #[error("tabulated drive samples are not uniformly spaced (sample {index} deviates by {deviation:e})")]
    NonUniformGrid { index: usize, deviation: f64 },

    #[error("tabulated drive covers [{start}, {end}] but [0, {required}] is needed")]
    DriveCoverage { start: f64, end: f64, required: f64 },

    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },

    #[error("squeezing terms did not cancel: residual spread {spread:e} exceeds {tolerance:e} (stage 2 must use the reversed detuning)")]
    CancellationViolation { spread: f64, tolerance: f64 },

    #[error("Hermitian eigensolver did not converge after {iterations} iterations (off-diagonal norm {off_norm:e})")]
    EigenNoConvergence { iterations: usize, off_norm: f64 },

    #[error("Fock cutoff {cutoff} too small: need at least {required} for max |alpha_c|^2 = {max_photons:.4}")]
    CutoffGuard { cutoff: usize, required: usize, max_photons: f64 },

    #[error("Fock truncation leak {leak:e} exceeds 1e-8 (raise the cutoff)")]
    NormLeak { leak: f64 },

    #[error("detuning must be positive (got {0})")]
    NonPositiveDetuning(f64),

    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),
}

impl Error {
    /// `true` for failures of a numerical check (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Self::CancellationViolation { .. } | Self::EigenNoConvergence { .. } | Self::NormLeak { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
