//! Similarity reduction to Jordan form and the change of variable
//! `y = h(z) ỹ(z)` for commuting `A`, `B`.

use crate::matrices::{commutator_defect, commute, jordan, ComplexMatrix, JordanDecomposition};
use crate::moments::MomentSequence;
use crate::series::{cauchy_product, GeneralizedSeries};
use crate::solver::{check_h1, DEFAULT_P_MAX};
use crate::{Error, Result, C64};

/// `z ∂ₘ y = (zÃ + J) y` with `Ã = P⁻¹AP`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub a_tilde: ComplexMatrix,
    pub decomposition: JordanDecomposition,
}

impl ReducedSystem {
    pub fn j(&self) -> &ComplexMatrix {
        &self.decomposition.j
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.decomposition.p
    }

    /// `P y` for a solution `y` of the reduced system.
    pub fn map_back(&self, y: &GeneralizedSeries<Vec<C64>>) -> Result<GeneralizedSeries<Vec<C64>>> {
        let coeffs = y
            .coeffs()
            .iter()
            .map(|s| self.p().mul_vec(s))
            .collect::<Result<Vec<_>>>()?;
        GeneralizedSeries::new(y.nu(), coeffs)
    }
}

pub fn jordan_reduce_system(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    hint: Option<&JordanDecomposition>,
) -> Result<ReducedSystem> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            found: a.n(),
        });
    }
    let decomposition = jordan(b, hint)?;
    let p = &decomposition.p;
    let a_tilde = p.inverse()?.try_mul(&a.try_mul(p)?)?;
    let (da, dt) = (a.det(), a_tilde.det());
    if (da - dt).norm() > 1e-9 * (1.0 + da.norm()) {
        return Err(Error::IllConditioned(format!(
            "similarity changed det(A) from {da} to {dt}"
        )));
    }
    Ok(ReducedSystem {
        a_tilde,
        decomposition,
    })
}

/// `h = Σ h_p z^p` with `h₀ = I` and the products `ŝ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeOfVariable {
    pub lambda: C64,
    pub mu: C64,
    pub h: GeneralizedSeries<ComplexMatrix>,
    pub s_hat: Vec<ComplexMatrix>,
}

impl ChangeOfVariable {
    /// `h · ỹ` truncated at the common order.
    pub fn apply(&self, y_tilde: &GeneralizedSeries<Vec<C64>>) -> Result<GeneralizedSeries<Vec<C64>>> {
        cauchy_product(&self.h, y_tilde)
    }
}

/// Builds `h` and `ŝ` to order `n` for `λ ∈ C`; `ratio(μ)` must be a
/// non-resonant eigenvalue of `B`.
pub fn change_of_variable(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    seq: &MomentSequence,
    mu: C64,
    lambda: C64,
    n: usize,
) -> Result<ChangeOfVariable> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            found: a.n(),
        });
    }
    if !commute(a, b)? {
        return Err(Error::NonCommuting(commutator_defect(a, b)?));
    }
    let h1 = check_h1(b, seq, mu, DEFAULT_P_MAX)?;
    if let Some(&p) = h1.resonances.first() {
        return Err(Error::Resonant { mu, p });
    }
    if !h1.in_spectrum {
        return Err(Error::Domain(format!(
            "ratio(μ) = {} is not an eigenvalue of B",
            h1.ratio_at_mu
        )));
    }
    let dim = b.n();
    let r: Vec<C64> = (0..=n).map(|p| seq.ratio(mu + p as f64)).collect::<Result<_>>()?;
    let shifted_a = a.shift(-lambda);
    let minus_b = b.scale(C64::new(-1.0, 0.0));

    let mut s_hat = vec![ComplexMatrix::identity(dim)];
    for k in 1..=n {
        let rk = minus_b.shift(r[k]).inverse()?;
        let next = rk.try_mul(&shifted_a)?.try_mul(&s_hat[k - 1])?;
        s_hat.push(next);
    }

    let mut h = vec![ComplexMatrix::identity(dim)];
    for p in 1..=n {
        let mut acc = ComplexMatrix::zeros(dim);
        for (j, hj) in h.iter().enumerate() {
            let gap = r[p] - r[p - j];
            let inner = s_hat[p - j - 1]
                .scale(lambda)
                .try_sub(&s_hat[p - j].scale(gap))?;
            acc = acc.try_add(&hj.try_mul(&inner)?)?;
        }
        h.push(acc.scale(C64::new(1.0, 0.0) / (r[p] - r[0])));
    }
    Ok(ChangeOfVariable {
        lambda,
        mu,
        h: GeneralizedSeries::new(C64::new(0.0, 0.0), h)?,
        s_hat,
    })
}
