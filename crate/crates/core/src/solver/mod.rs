//! Hypothesis checks, the Floquet recursion and residual verification for
//! `z ∂ₘ y = (zA + B) y`.

mod compensated;
mod floquet;
mod hypotheses;
mod realizations;

pub use floquet::{
    floquet_basis, floquet_coefficients, residual, residual_series, FloquetDiagnostics,
    FloquetSolution,
};
pub use hypotheses::{
    check_coro1, check_h1, check_h1_shifted, check_h1_with, check_h2, check_hypotheses,
    Coro1Report, H1Verdict, H2Report, HypothesisReport,
};
pub use realizations::{fractional_reparam, verify_jackson, FractionalSolution};

use crate::matrices::{ComplexMatrix, EPS_SPEC};
use crate::moments::MomentSequence;
use crate::{Error, Result};

/// Default number of indices scanned by the hypothesis checks.
pub const DEFAULT_P_MAX: usize = 10_000;
/// Coefficient norm beyond which the recursion is abandoned.
pub const GROWTH_LIMIT: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative spectrum-membership tolerance, scaled by `1 + ‖B‖₁`.
    pub spec: f64,
    /// Acceptable normalized residual.
    pub res: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            spec: EPS_SPEC,
            res: 1e-10,
        }
    }
}

/// One system `z ∂ₘ y = (zA + B) y` with its truncation and scan depth.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub seq: MomentSequence,
    pub order: usize,
    pub p_max: usize,
    pub tol: Tolerances,
}

impl ProblemSpec {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, seq: MomentSequence, order: usize) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::DimensionMismatch {
                expected: b.n(),
                found: a.n(),
            });
        }
        if order == 0 {
            return Err(Error::Domain("truncation order must be at least 1".into()));
        }
        Ok(Self {
            a,
            b,
            seq,
            order,
            p_max: DEFAULT_P_MAX,
            tol: Tolerances::default(),
        })
    }

    pub fn with_p_max(mut self, p_max: usize) -> Self {
        self.p_max = p_max.max(1);
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn n(&self) -> usize {
        self.b.n()
    }
}
