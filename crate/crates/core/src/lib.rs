//! Floquet-type solutions of linear moment differential systems
//! `z ∂ₘ y = (zA + B) y` with a singularity of the first kind at the origin.
//!
//! The crate is layered bottom-up:
//!
//! * [`special`]: complex log-Gamma, q-Gamma, q-brackets and Jacobi theta.
//! * [`moments`]: moment sequences `m(z)` and the ratio `m(z)/m(z-1)`.
//! * [`matrices`]: small dense complex matrices, spectra and Jordan data.
//! * [`series`]: truncated generalized power series and log-power terms.
//! * [`solver`]: hypothesis checks, the Floquet recursion and residuals.
//! * [`structure`]: change of variable, generalized matrix powers, planar
//!   closed forms and q-theta H-functions.

pub mod error;
pub mod matrices;
pub mod moments;
pub mod series;
pub mod solver;
pub mod special;
pub mod structure;

pub use error::{Error, Result};
pub use matrices::{ComplexMatrix, JordanDecomposition, SpectralData};
pub use moments::{MomentSequence, Region};
pub use num_complex::Complex64;
pub use series::{GeneralizedSeries, LogPowerSolution};
pub use solver::{FloquetSolution, HypothesisReport, ProblemSpec, Tolerances};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn finite_or_overflow(z: C64, what: &'static str) -> Result<C64> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(Error::Overflow(what))
    }
}
