//! Structural transforms and solution assembly: change of variable, Jordan
//! reduction, generalized matrix powers, planar closed forms and q-theta
//! H-functions.

mod planar;
mod qtheta;
mod transform;
mod zmb;

pub use planar::{
    diagonal_closed_form, jordan_closed_form, planar_diagonal, planar_jordan, PlanarDiagonal,
    PlanarJordan, PlanarParams, SecondSolution,
};
pub use qtheta::{q_h_functions, telescope_additive, QHFunctions, TELESCOPE_MAX_STEPS};
pub use transform::{change_of_variable, jordan_reduce_system, ChangeOfVariable, ReducedSystem};
pub use zmb::{classical_h, zmb_diagonalizable, zmb_general, SolutionColumn, SymbolicSolutionMatrix};

use crate::moments::MomentSequence;
use crate::{Error, Result};

/// Source of functions with `z ∂ₘ H_{p+1} = μ₁ H_{p+1} + H_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum H3Provider {
    /// `z^μ logᵖ z / p!` for the factorial sequence.
    Classical,
    /// Theta-quotient construction for `QFactorial(q)`.
    QTheta { q: f64 },
}

impl H3Provider {
    /// The provider matching `seq`, if one exists.
    pub fn for_sequence(seq: &MomentSequence) -> Option<Self> {
        match seq {
            MomentSequence::Factorial => Some(Self::Classical),
            MomentSequence::QFactorial { q } => Some(Self::QTheta { q: *q }),
            _ => None,
        }
    }

    /// Errors unless the provider realizes `seq`.
    pub fn check(&self, seq: &MomentSequence) -> Result<()> {
        match (self, seq) {
            (Self::Classical, MomentSequence::Factorial) => Ok(()),
            (Self::QTheta { q }, MomentSequence::QFactorial { q: sq }) if q == sq => Ok(()),
            _ => Err(Error::H3Unavailable(format!(
                "{self:?} does not realize the sequence {seq}"
            ))),
        }
    }
}

/// Resolves an optional provider against `seq`.
pub(crate) fn resolve_provider(seq: &MomentSequence, given: Option<H3Provider>) -> Result<H3Provider> {
    let p = given
        .or_else(|| H3Provider::for_sequence(seq))
        .ok_or_else(|| Error::H3Unavailable(format!("no H-functions are known for {seq}")))?;
    p.check(seq)?;
    Ok(p)
}
