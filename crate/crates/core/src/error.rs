use thiserror::Error;

use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole at {0}")]
    Pole(C64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow in {0}")]
    Overflow(&'static str),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("singular matrix (pivot {pivot:.3e}, threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ill-conditioned Jordan structure: {0}")]
    IllConditioned(String),
    #[error("Jordan hint rejected: defect {defect:.3e} exceeds {tolerance:.3e}")]
    HintRejected { defect: f64, tolerance: f64 },
    #[error("branch cut: cannot evaluate at {0}")]
    BranchCut(C64),
    #[error("s0 is not an eigenvector: residual {residual:.3e} exceeds {tolerance:.3e}")]
    EigvecResidual { residual: f64, tolerance: f64 },
    #[error("coefficient growth overflow at p = {p} (norm {norm:.3e})")]
    GrowthOverflow { p: usize, norm: f64 },
    #[error("matrices A and B do not commute (defect {0:.3e})")]
    NonCommuting(f64),
    #[error("no exponent found for eigenvalue {0}")]
    NoExponentFound(C64),
    #[error("resonance at p = {p} for exponent {mu}")]
    Resonant { mu: C64, p: usize },
    #[error("no H-function provider: {0}")]
    H3Unavailable(String),
    #[error("telescoping sum failed to converge after {0} steps")]
    TelescopeDivergence(usize),
    #[error("point {0} is too close to a theta zero")]
    PoleProximity(C64),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier used in structured reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole(_) => "PoleError",
            Error::Domain(_) => "DomainError",
            Error::Overflow(_) => "Overflow",
            Error::DivisionByZero(_) => "DivisionByZero",
            Error::Convergence(_) => "ConvergenceError",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::IllConditioned(_) => "IllConditioned",
            Error::HintRejected { .. } => "HintRejected",
            Error::BranchCut(_) => "BranchCutError",
            Error::EigvecResidual { .. } => "EigvecResidual",
            Error::GrowthOverflow { .. } => "GrowthOverflow",
            Error::NonCommuting(_) => "NonCommuting",
            Error::NoExponentFound(_) => "NoExponentFound",
            Error::Resonant { .. } => "Resonant",
            Error::H3Unavailable(_) => "H3Unavailable",
            Error::TelescopeDivergence(_) => "TelescopeDivergence",
            Error::PoleProximity(_) => "PoleProximity",
            Error::Parse(_) => "ParseError",
        }
    }
}
