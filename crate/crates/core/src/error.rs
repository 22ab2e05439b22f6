use thiserror::Error;

/// Everything that can go wrong while building or analysing the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("displacement a = {0} is outside the open interval (0, 1)")]
    Displacement(f64),
    #[error("coupling xi = {0} must be finite and non-negative")]
    Coupling(f64),
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },
    #[error(
        "root merger: {found} real roots found but {requested} requested; \
         complex pairs expected near kappa = {gaps:?}"
    )]
    Merger {
        requested: usize,
        found: usize,
        gaps: Vec<f64>,
    },
    #[error("exceptional point: double root at kappa = {kappa}")]
    ExceptionalPoint { kappa: f64 },
    #[error("levels {n} and {m} are degenerate at kappa = {kappa}")]
    Degenerate { n: usize, m: usize, kappa: f64 },
    #[error("level {n} is complex (kappa = {re} + {im}i); a real root is required")]
    ComplexRoot { n: usize, re: f64, im: f64 },
    #[error("state {n} is nearly self-orthogonal: parity overlap {overlap:e}")]
    SelfOrthogonal { n: usize, overlap: f64 },
    #[error("parity overlap of state {n} is not real: imaginary part {im:e}")]
    NonRealOverlap { n: usize, im: f64 },
    #[error("closed-form overlap and quadrature differ by {difference:e} (scale {scale:e})")]
    Integration { difference: f64, scale: f64 },
    #[error("metric weight {index} = {value} is not strictly positive")]
    Weight { index: usize, value: f64 },
    #[error("metric is not positive definite: smallest eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("expansion evaluated at its pole: rho^2 = {0} >= 2")]
    Pole(f64),
    #[error("continuation failed at xi = {xi}: step halving exhausted")]
    Continuation { xi: f64 },
    #[error("dense eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("matching system residual {0:e} exceeds tolerance")]
    Residual(f64),
    #[error("length mismatch: expected {expected}, got {actual}")]
    Length { expected: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable variant name for machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Displacement(_) => "displacement",
            Self::Coupling(_) => "coupling",
            Self::Domain { .. } => "domain",
            Self::NoConvergence { .. } => "no-convergence",
            Self::Merger { .. } => "merger",
            Self::ExceptionalPoint { .. } => "exceptional-point",
            Self::Degenerate { .. } => "degenerate",
            Self::ComplexRoot { .. } => "complex-root",
            Self::SelfOrthogonal { .. } => "self-orthogonal",
            Self::NonRealOverlap { .. } => "non-real-overlap",
            Self::Integration { .. } => "integration",
            Self::Weight { .. } => "weight",
            Self::NotPositive(_) => "not-positive",
            Self::Pole(_) => "pole",
            Self::Continuation { .. } => "continuation",
            Self::Eigensolver(_) => "eigensolver",
            Self::Residual(_) => "residual",
            Self::Length { .. } => "length",
        }
    }
}
