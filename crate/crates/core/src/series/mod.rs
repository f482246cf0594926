//! Truncated generalized power series `Σ_{p=0..N} s_p z^{p+ν}` and
//! log-power expressions `Σ_k c_k(z) z^μ log^k z`.

mod coeff;
mod logpower;

pub use coeff::{CoeffMul, Coefficient, Shape};
pub use logpower::{classical_derivative_logpower, LogPowerSolution};

use crate::moments::MomentSequence;
use crate::{Error, Result, C64};

fn as_integer(nu: C64) -> Option<i64> {
    if nu.im == 0.0 && nu.re.fract() == 0.0 && nu.re.abs() < 1e15 {
        Some(nu.re as i64)
    } else {
        None
    }
}

fn domain_nu(nu: C64) -> Error {
    Error::Domain(format!(
        "moment derivative needs Re(ν) >= 1 or ν a nonnegative integer, got {nu}"
    ))
}

/// `z^c` on the principal branch; integer exponents need no cut.
pub fn principal_power(z: C64, c: C64) -> Result<C64> {
    match as_integer(c) {
        Some(k) if k >= 0 => Ok(z.powi(k as i32)),
        Some(k) if z.norm() > 0.0 => Ok(z.powi(k as i32)),
        _ => {
            if z.im == 0.0 && z.re <= 0.0 {
                return Err(Error::BranchCut(z));
            }
            Ok((c * z.ln()).exp())
        }
    }
}

/// `Σ_{p=0..N} s_p z^{p+ν}` with a homogeneous coefficient shape.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSeries<T> {
    nu: C64,
    coeffs: Vec<T>,
}

impl<T: Coefficient> GeneralizedSeries<T> {
    pub fn new(nu: C64, coeffs: Vec<T>) -> Result<Self> {
        if !crate::is_finite(nu) {
            return Err(Error::Domain("series exponent must be finite".into()));
        }
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Domain("a series needs at least one coefficient".into()))?;
        let shape = first.shape();
        if let Some(bad) = coeffs.iter().find(|c| c.shape() != shape) {
            return Err(Error::DimensionMismatch {
                expected: shape.len(),
                found: bad.shape().len(),
            });
        }
        if coeffs.iter().any(|c| !c.all_finite()) {
            return Err(Error::Domain("series coefficients must be finite".into()));
        }
        Ok(Self { nu, coeffs })
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, p: usize) -> Option<&T> {
        self.coeffs.get(p)
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn shape(&self) -> Shape {
        self.coeffs[0].shape()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            nu: self.nu,
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            nu: self.nu,
            coeffs: self.coeffs.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> GeneralizedSeries<U> {
        GeneralizedSeries {
            nu: self.nu,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Rewrites at exponent `nu - k` by prepending `k` zero coefficients.
    pub fn lower_exponent(&self, k: usize) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self {
            nu: self.nu - k as f64,
            coeffs,
        }
    }

    /// Sum after re-alignment by an integer exponent shift; the result is
    /// valid up to the smaller of the two reach exponents.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.shape().len(),
                found: other.shape().len(),
            });
        }
        let diff = other.nu - self.nu;
        let k = as_integer(diff).ok_or_else(|| {
            Error::Domain(format!(
                "exponents {} and {} differ by a non-integer",
                self.nu, other.nu
            ))
        })?;
        let (lo, hi) = if k >= 0 { (self, other) } else { (other, self) };
        let hi = hi.lower_exponent(k.unsigned_abs() as usize);
        let order = lo.order().min(hi.order());
        let coeffs = (0..=order).map(|p| lo.coeffs[p].add(&hi.coeffs[p])).collect();
        Ok(Self { nu: lo.nu, coeffs })
    }

    /// Moment derivative: coefficients `a_p · r(p+ν)` at exponent `ν−1`.
    ///
    /// For `ν = 0` the constant term is dropped and the result stays in
    /// `C[[z]]` with order `N−1`.
    pub fn moment_derivative(&self, seq: &MomentSequence) -> Result<Self> {
        match as_integer(self.nu) {
            Some(0) => {
                if self.order() == 0 {
                    return Ok(Self {
                        nu: self.nu,
                        coeffs: vec![self.coeffs[0].zero_like()],
                    });
                }
                let coeffs = (0..self.order())
                    .map(|k| {
                        let r = seq.ratio(C64::new((k + 1) as f64, 0.0))?;
                        Ok(self.coeffs[k + 1].scale(r))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self { nu: self.nu, coeffs })
            }
            Some(k) if k < 0 => Err(domain_nu(self.nu)),
            None if self.nu.re < 1.0 => Err(domain_nu(self.nu)),
            _ => {
                let coeffs = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(p, a)| Ok(a.scale(seq.ratio(self.nu + p as f64)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self {
                    nu: self.nu - 1.0,
                    coeffs,
                })
            }
        }
    }

    /// Principal-branch value of the truncated sum.
    pub fn evaluate(&self, z: C64) -> Result<T> {
        let base = principal_power(z, self.nu)?;
        let mut acc = self.coeffs[0].zero_like();
        let mut zp = C64::new(1.0, 0.0);
        for s in &self.coeffs {
            acc = acc.add(&s.scale(base * zp));
            zp *= z;
        }
        if !acc.all_finite() {
            return Err(Error::Overflow("series evaluation"));
        }
        Ok(acc)
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm1()).fold(0.0, f64::max)
    }
}

/// `Σ_p (Σ_{j≤p} h_j y_{p−j}) z^{p+ν_h+ν_y}`, truncated at `min(N_h, N_y)`.
pub fn cauchy_product<L, R>(
    h: &GeneralizedSeries<L>,
    y: &GeneralizedSeries<R>,
) -> Result<GeneralizedSeries<<L as CoeffMul<R>>::Output>>
where
    L: Coefficient + CoeffMul<R>,
    R: Coefficient,
{
    let order = h.order().min(y.order());
    let mut coeffs = Vec::with_capacity(order + 1);
    for p in 0..=order {
        let mut acc = h.coeffs[0].mul(&y.coeffs[p])?;
        for j in 1..=p {
            acc = acc.add(&h.coeffs[j].mul(&y.coeffs[p - j])?);
        }
        coeffs.push(acc);
    }
    GeneralizedSeries::new(h.nu + y.nu, coeffs)
}

fn rel_close(x: C64, y: C64, tol: f64) -> bool {
    (x - y).norm() <= tol * x.norm().max(y.norm())
}

/// Compares the shift-into-`C[[z]]` rule, built from `m(k+1)/m(k)` via
/// log-moments, against the direct exponent rule, coefficientwise.
pub fn integer_nu_consistency<T: Coefficient>(
    f: &GeneralizedSeries<T>,
    seq: &MomentSequence,
) -> Result<bool> {
    let nu = match as_integer(f.nu) {
        Some(k) if k >= 1 => k as usize,
        _ => {
            return Err(Error::Domain(format!(
                "exponent must be a positive integer, got {}",
                f.nu
            )))
        }
    };
    let flat = f.lower_exponent(nu);
    let mut shifted = Vec::with_capacity(flat.order());
    for k in 0..flat.order() {
        let lr = seq.ln_m(C64::new((k + 1) as f64, 0.0))? - seq.ln_m(C64::new(k as f64, 0.0))?;
        shifted.push(flat.coeffs[k + 1].scale(lr.exp()));
    }
    let direct = f.moment_derivative(seq)?;
    // direct has exponent ν−1, shifted starts at z⁰
    for (p, d) in direct.coeffs.iter().enumerate() {
        let a = &shifted[nu - 1 + p];
        let (av, dv) = (a.components(), d.components());
        if av.iter().zip(&dv).any(|(x, y)| !rel_close(*x, *y, 1e-12)) {
            return Ok(false);
        }
    }
    Ok(shifted[..nu - 1].iter().all(|s| s.norm1() == 0.0))
}
