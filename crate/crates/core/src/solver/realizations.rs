//! Concrete operators behind particular moment sequences: the Jackson
//! q-difference quotient and the fractional exponent map.

use super::FloquetSolution;
use crate::moments::MomentSequence;
use crate::series::{principal_power, Coefficient, GeneralizedSeries};
use crate::{Error, Result, C64};

/// `Σ s_p z^{(p+μ)/α}`, the exponent-mapped form of a `GammaRatio(α)` solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub alpha: f64,
    pub mu: C64,
    pub coeffs: Vec<Vec<C64>>,
    pub exponents: Vec<C64>,
    /// The system the mapped series formally solves.
    pub system: String,
}

impl FractionalSolution {
    pub fn evaluate(&self, z: C64) -> Result<Vec<C64>> {
        let n = self.coeffs[0].len();
        let mut acc = vec![C64::new(0.0, 0.0); n];
        for (s, e) in self.coeffs.iter().zip(&self.exponents) {
            let w = principal_power(z, *e)?;
            acc.iter_mut().zip(s).for_each(|(a, x)| *a += x * w);
        }
        if acc.iter().all(|z| crate::is_finite(*z)) {
            Ok(acc)
        } else {
            Err(Error::Overflow("fractional evaluation"))
        }
    }
}

pub fn fractional_reparam(y: &FloquetSolution, alpha: f64) -> Result<FractionalSolution> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("α must be positive, got {alpha}")));
    }
    let coeffs = y.series.coeffs().to_vec();
    let exponents = (0..coeffs.len())
        .map(|p| (y.mu + p as f64) / alpha)
        .collect();
    Ok(FractionalSolution {
        alpha,
        mu: y.mu,
        coeffs,
        exponents,
        system: format!("z^(1/{alpha}) D^(1/{alpha}) y = (z^(1/{alpha}) A + B) y"),
    })
}

/// Largest componentwise gap between `∂ₘ y` for `QFactorial(q)` and the
/// quotient `(y(qz) − y(z)) / ((q−1) z)` over `points`.
pub fn verify_jackson<T: Coefficient>(y: &GeneralizedSeries<T>, q: f64, points: &[C64]) -> Result<f64> {
    let seq = MomentSequence::q_factorial(q)?;
    let d = y.moment_derivative(&seq)?;
    let mut worst: f64 = 0.0;
    for &z in points {
        if z.norm() == 0.0 {
            return Err(Error::DivisionByZero("Jackson quotient at z = 0".into()));
        }
        let lhs = d.evaluate(z)?.components();
        let hi = y.evaluate(z * q)?.components();
        let lo = y.evaluate(z)?.components();
        let den = (q - 1.0) * z;
        for ((l, h), o) in lhs.iter().zip(&hi).zip(&lo) {
            worst = worst.max((l - (h - o) / den).norm());
        }
    }
    Ok(worst)
}
