//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state construction, the quadrature engine, the entropy
/// functionals and the measure evaluators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input that is structurally valid but carries no information
    /// (e.g. an all-zero amplitude vector).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Dimension or length mismatch between operands.
    #[error("shape mismatch: {0}")]
    ShapeError(String),

    /// A numerical tolerance was violated (non-unitary operator, negative
    /// density beyond clipping range, failed closed form, ...).
    #[error("numerical failure: {0}")]
    NumericsError(String),

    /// The Fock cutoff is too small for the requested state; `required`
    /// hints at a cutoff that would satisfy the tail tolerance.
    #[error("cutoff {cutoff} leaves tail mass {tail_mass:.3e} (tolerance {tolerance:.1e}); try cutoff >= {required}")]
    TruncationError {
        cutoff: usize,
        tail_mass: f64,
        tolerance: f64,
        required: usize,
    },

    /// No closed-form quadrature distribution exists for this state family.
    #[error("no analytic quadrature distribution for family {0}")]
    NotAnalytic(String),

    /// The quadrature grid fails to capture enough probability mass.
    #[error("grid captures only {captured:.12} of the distribution; suggest half_width >= {suggested_half_width:.3}")]
    GridError {
        captured: f64,
        suggested_half_width: f64,
    },

    /// A distribution handed to an entropy functional is not normalized.
    #[error("distribution not normalized: integral = {0:.12}")]
    NormalizationError(f64),

    /// KL divergence undefined: q vanishes where p has mass.
    #[error("support violation at x = {x}: p = {p:.3e} but q = {q:.3e}")]
    SupportError { x: f64, p: f64, q: f64 },

    /// Too few samples for the requested estimator.
    #[error("estimator needs at least {required} samples, got {got}")]
    SampleSizeError { required: usize, got: usize },

    /// Argument outside a function's mathematical domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A matrix required to be a density operator is not one.
    #[error("not a quantum state: {0}")]
    NotAState(String),

    /// A sweep found no sign change for the requested threshold.
    #[error("no threshold crossing in range: criterion {}detected everywhere", if *.detects { "" } else { "un" })]
    NoThreshold { detects: bool },

    /// A quadrature density came out negative beyond tolerance.
    #[error("not a distribution: density {density:.3e} at x = {x}")]
    NotDistribution { x: f64, density: f64 },

    /// Unparseable state specification string.
    #[error("cannot parse state spec '{0}': {1}")]
    ParseError(String, String),
}

pub type Result<T> = std::result::Result<T, Error>;
