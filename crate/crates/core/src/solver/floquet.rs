//! The Floquet recursion `(ratio(p+μ)I − B) s_p = A s_{p−1}` and its residual.

use super::compensated::{refined_step, SplitVec};
use super::hypotheses::check_h1_with;
use super::{ProblemSpec, GROWTH_LIMIT};
use crate::matrices::{eigen, rank, vec_norm1};
use crate::moments::{solve_ratio_equation, Region};
use crate::series::GeneralizedSeries;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetDiagnostics {
    /// `‖s_p‖₁` for `p = 0..=N`.
    pub coeff_growth: Vec<f64>,
    /// `(‖s_N‖ / ‖s_{N/2}‖)^{1/(N − N/2)}`.
    pub geometric_rate_estimate: f64,
}

/// `y(z) = Σ s_p z^{p+μ}` truncated at the problem's order.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSolution {
    pub mu: C64,
    pub series: GeneralizedSeries<Vec<C64>>,
    pub diagnostics: FloquetDiagnostics,
}

impl FloquetSolution {
    pub fn s0(&self) -> &[C64] {
        &self.series.coeffs()[0]
    }

    pub fn evaluate(&self, z: C64) -> Result<Vec<C64>> {
        self.series.evaluate(z)
    }
}

fn diagnostics(coeffs: &[Vec<C64>]) -> FloquetDiagnostics {
    let growth: Vec<f64> = coeffs.iter().map(|s| vec_norm1(s)).collect();
    let n = growth.len() - 1;
    let half = n / 2;
    let rate = if n == 0 || growth[half] == 0.0 {
        0.0
    } else {
        (growth[n] / growth[half]).powf(1.0 / (n - half) as f64)
    };
    FloquetDiagnostics {
        coeff_growth: growth,
        geometric_rate_estimate: rate,
    }
}

/// Coefficients `s_0..s_N` from an eigenvector `s_0` of `B` for `ratio(μ)`.
pub fn floquet_coefficients(spec: &ProblemSpec, mu: C64, s0: &[C64]) -> Result<FloquetSolution> {
    if s0.len() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            found: s0.len(),
        });
    }
    if mu.re < 1.0 {
        return Err(Error::Domain(format!("Re(μ) must be at least 1, got {mu}")));
    }
    let r0 = spec.seq.ratio(mu)?;
    let bs0 = spec.b.mul_vec(s0)?;
    let defect: f64 = bs0.iter().zip(s0).map(|(x, s)| (x - r0 * s).norm()).sum();
    let tolerance = spec.tol.spec * (1.0 + spec.b.one_norm()) * vec_norm1(s0);
    if defect.is_nan() || defect > tolerance || vec_norm1(s0) == 0.0 {
        return Err(Error::EigvecResidual {
            residual: defect,
            tolerance,
        });
    }
    let minus_b = spec.b.scale(C64::new(-1.0, 0.0));
    let mut coeffs = vec![s0.to_vec()];
    let mut prev = SplitVec::exact(s0);
    for p in 1..=spec.order {
        let r = spec.seq.ratio(mu + p as f64)?;
        let next = refined_step(&minus_b.shift(r), &spec.a, &prev)?;
        let norm = vec_norm1(&next.hi);
        if norm.is_nan() || norm > GROWTH_LIMIT {
            return Err(Error::GrowthOverflow { p, norm });
        }
        coeffs.push(next.hi.clone());
        prev = next;
    }
    let diagnostics = diagnostics(&coeffs);
    Ok(FloquetSolution {
        mu,
        series: GeneralizedSeries::new(mu, coeffs)?,
        diagnostics,
    })
}

/// Normalized coefficient residual of `z ∂ₘ y − (zA + B) y` over `p = 0..=N`.
pub fn residual_series(y: &GeneralizedSeries<Vec<C64>>, spec: &ProblemSpec) -> Result<f64> {
    let nu = y.nu();
    let coeffs = y.coeffs();
    let mut worst: f64 = 0.0;
    for (p, s) in coeffs.iter().enumerate() {
        let exponent = nu + p as f64;
        let lhs: Vec<C64> = if exponent.norm() == 0.0 {
            vec![C64::new(0.0, 0.0); s.len()]
        } else {
            let r = spec.seq.ratio(exponent)?;
            s.iter().map(|x| x * r).collect()
        };
        let bs = spec.b.mul_vec(s)?;
        let a_prev = if p == 0 {
            vec![C64::new(0.0, 0.0); s.len()]
        } else {
            spec.a.mul_vec(&coeffs[p - 1])?
        };
        let d: f64 = (0..s.len()).map(|i| (lhs[i] - bs[i] - a_prev[i]).norm()).sum();
        worst = worst.max(d);
    }
    let scale = (1.0 + spec.a.one_norm() + spec.b.one_norm()) * y.max_norm();
    Ok(if scale == 0.0 { 0.0 } else { worst / scale })
}

/// [`residual_series`] for a solver output; non-evaluable input reports infinity.
pub fn residual(y: &FloquetSolution, spec: &ProblemSpec) -> f64 {
    residual_series(&y.series, spec).unwrap_or(f64::INFINITY)
}

/// One solution per admissible `(μ, s_0)` pair in `region`, keeping only
/// leading vectors that raise the rank.
pub fn floquet_basis(spec: &ProblemSpec, region: &Region) -> Result<Vec<FloquetSolution>> {
    let spectrum = eigen(&spec.b)?;
    let mut out: Vec<FloquetSolution> = Vec::new();
    let mut leads: Vec<Vec<C64>> = Vec::new();
    for cluster in &spectrum.clusters {
        let roots = match solve_ratio_equation(&spec.seq, cluster.value, region) {
            Ok(r) => r,
            Err(_) => continue,
        };
        for mu in roots {
            let verdict = match check_h1_with(&spectrum, &spec.seq, mu, spec.p_max, spec.tol.spec) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if !verdict.holds {
                continue;
            }
            for v in &cluster.vectors {
                let mut trial = leads.clone();
                trial.push(v.clone());
                if rank(&trial, 1e-9) <= leads.len() {
                    continue;
                }
                if let Ok(sol) = floquet_coefficients(spec, mu, v) {
                    leads.push(v.clone());
                    out.push(sol);
                }
            }
        }
    }
    Ok(out)
}
