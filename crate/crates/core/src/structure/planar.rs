//! Two-dimensional systems with diagonal or Jordan `B`: recursion output,
//! closed forms for `det A = 0` and the second Jordan solution.

use std::collections::BTreeMap;

use super::zmb::{classical_h, SolutionColumn};
use super::{q_h_functions, resolve_provider, H3Provider};
use crate::matrices::ComplexMatrix;
use crate::moments::MomentSequence;
use crate::series::{GeneralizedSeries, LogPowerSolution};
use crate::solver::{check_h1, floquet_coefficients, FloquetSolution, ProblemSpec, DEFAULT_P_MAX};
use crate::{Error, Result, C64};

/// Entries of `A = [[a, b], [c, d]]` with the derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    /// `a + d`.
    pub lambda: C64,
    /// `ratio(μ₁) − ratio(μ₂)` (diagonal case).
    pub beta: Option<C64>,
    /// `aβ/λ` when `λ ≠ 0` (diagonal case).
    pub alpha: Option<C64>,
}

impl PlanarParams {
    fn new(m: &ComplexMatrix, beta: Option<C64>) -> Self {
        let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
        let lambda = a + d;
        let alpha = match beta {
            Some(beta) if lambda.norm() != 0.0 => Some(a * beta / lambda),
            _ => None,
        };
        Self {
            a,
            b,
            c,
            d,
            lambda,
            beta,
            alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDiagonal {
    pub first: FloquetSolution,
    pub second: FloquetSolution,
    pub params: PlanarParams,
    /// Largest relative gap between closed forms and recursion when `det A = 0`.
    pub closed_form_deviation: Option<f64>,
}

/// Second solution of the Jordan case.
#[derive(Debug, Clone, PartialEq)]
pub enum SecondSolution {
    /// `A ≡ 0`: the column `(H_m, z^μ)ᵀ`.
    Column(SolutionColumn),
    /// `Σ s_{p,1} z^{p+μ} + log z · Σ s_{p,2} z^{p+μ}`.
    LogSeries {
        regular: GeneralizedSeries<Vec<C64>>,
        log_part: GeneralizedSeries<Vec<C64>>,
    },
}

impl SecondSolution {
    /// Log-power form of each component, when the solution has one.
    pub fn entries(&self) -> Option<Vec<LogPowerSolution>> {
        match self {
            Self::Column(SolutionColumn::LogPower(e)) => Some(e.clone()),
            Self::Column(_) => None,
            Self::LogSeries { regular, log_part } => Some(
                (0..2)
                    .map(|i| {
                        let poly = |s: &GeneralizedSeries<Vec<C64>>| -> Vec<C64> {
                            s.coeffs().iter().map(|v| v[i]).collect()
                        };
                        LogPowerSolution::new(
                            regular.nu(),
                            BTreeMap::from([(0, poly(regular)), (1, poly(log_part))]),
                        )
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarJordan {
    pub first: FloquetSolution,
    pub second: Option<SecondSolution>,
    /// Normalized residual of the second solution up to the truncation order.
    pub second_residual: Option<f64>,
    /// Why no second solution was built.
    pub note: Option<String>,
    pub params: PlanarParams,
    pub closed_form_deviation: Option<f64>,
}

fn require_planar(a: &ComplexMatrix) -> Result<()> {
    if a.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.n(),
        });
    }
    Ok(())
}

fn require_re(mu: C64) -> Result<()> {
    if mu.re < 1.0 {
        return Err(Error::Domain(format!("Re(μ) must be at least 1, got {mu}")));
    }
    Ok(())
}

fn det_vanishes(a: &ComplexMatrix) -> bool {
    let n = a.one_norm();
    a.det().norm() <= 1e-12 * (1.0 + n * n)
}

fn require_det_zero(a: &ComplexMatrix) -> Result<()> {
    if !det_vanishes(a) {
        return Err(Error::Domain(format!(
            "closed forms need det(A) = 0, got {}",
            a.det()
        )));
    }
    Ok(())
}

fn non_resonant(b: &ComplexMatrix, seq: &MomentSequence, mu: C64) -> Result<()> {
    let v = check_h1(b, seq, mu, DEFAULT_P_MAX)?;
    match v.resonances.first() {
        Some(&p) => Err(Error::Resonant { mu, p }),
        None => Ok(()),
    }
}

/// `D_i = ratio(μ+i) − ratio(μ)` for `i = 0..=n`.
fn gaps(seq: &MomentSequence, mu: C64, n: usize) -> Result<Vec<C64>> {
    let r0 = seq.ratio(mu)?;
    (0..=n).map(|i| Ok(seq.ratio(mu + i as f64)? - r0)).collect()
}

/// Largest `‖closed_p − s_p‖₁ / ‖s_p‖₁` over `p`.
fn max_relative_gap(closed: &[[C64; 2]], sol: &FloquetSolution) -> f64 {
    closed
        .iter()
        .zip(sol.series.coeffs())
        .map(|(c, s)| {
            let gap = (c[0] - s[0]).norm() + (c[1] - s[1]).norm();
            let size = s[0].norm() + s[1].norm();
            if size == 0.0 { gap } else { gap / size }
        })
        .fold(0.0, f64::max)
}

/// `(f_p, g_p)` for `B = diag(ratio(μ₁), ratio(μ₂))` and `det A = 0`,
/// in the `λ ≠ 0` or `λ = 0` form as appropriate.
pub fn diagonal_closed_form(
    seq: &MomentSequence,
    mu1: C64,
    mu2: C64,
    a: &ComplexMatrix,
    order: usize,
) -> Result<Vec<[C64; 2]>> {
    require_planar(a)?;
    require_det_zero(a)?;
    let beta = seq.ratio(mu1)? - seq.ratio(mu2)?;
    let PlanarParams { a: pa, c: pc, lambda, .. } = PlanarParams::new(a, Some(beta));
    let d = gaps(seq, mu1, order)?;
    let one = C64::new(1.0, 0.0);
    let mut out = vec![[one, C64::new(0.0, 0.0)]];
    if order >= 1 {
        out.push([pa / d[1], pc / (d[1] + beta)]);
    }
    let prod = |from: usize, to: usize, f: &dyn Fn(usize) -> C64| -> C64 {
        (from..=to).fold(one, |acc, i| acc * f(i))
    };
    for p in 2..=order {
        let dp = prod(1, p, &|i| d[i]);
        let dp1 = prod(1, p - 1, &|i| d[i]);
        let bp = prod(1, p, &|i| d[i] + beta);
        let bp1 = prod(1, p - 1, &|i| d[i] + beta);
        let pair = if lambda.norm() != 0.0 {
            let alpha = pa * beta / lambda;
            let num = lambda.powu(p as u32 - 1) * prod(1, p - 1, &|i| d[i] + alpha);
            [pa * num / (dp * bp1), pc * num / (dp1 * bp)]
        } else {
            let ab = (pa * beta).powu(p as u32 - 1);
            [pa * ab / (dp * bp1), pc * ab / (dp1 * bp)]
        };
        out.push(pair);
    }
    Ok(out)
}

/// `(f_p, g_p)` for `B = [[ratio(μ), 1], [0, ratio(μ)]]` and `det A = 0`.
pub fn jordan_closed_form(
    seq: &MomentSequence,
    mu: C64,
    a: &ComplexMatrix,
    order: usize,
) -> Result<Vec<[C64; 2]>> {
    require_planar(a)?;
    require_det_zero(a)?;
    let PlanarParams { a: pa, c: pc, lambda, .. } = PlanarParams::new(a, None);
    let d = gaps(seq, mu, order)?;
    let mut out = vec![[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]];
    let mut k = C64::new(1.0, 0.0);
    for &dp in &d[1..=order] {
        out.push([k * (pa + pc / dp) / dp, k * pc / dp]);
        k *= (lambda + pc / dp) / dp;
    }
    Ok(out)
}

/// Swaps the two coordinates of a planar matrix.
fn swapped(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![a.get(1, 1), a.get(1, 0)], vec![a.get(0, 1), a.get(0, 0)]])
        .expect("2x2")
}

pub fn planar_diagonal(
    a: &ComplexMatrix,
    seq: &MomentSequence,
    mu1: C64,
    mu2: C64,
    order: usize,
) -> Result<PlanarDiagonal> {
    require_planar(a)?;
    require_re(mu1)?;
    require_re(mu2)?;
    let (r1, r2) = (seq.ratio(mu1)?, seq.ratio(mu2)?);
    let b = ComplexMatrix::diag(&[r1, r2]);
    non_resonant(&b, seq, mu1)?;
    non_resonant(&b, seq, mu2)?;
    let spec = ProblemSpec::new(a.clone(), b, seq.clone(), order)?;
    let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let first = floquet_coefficients(&spec, mu1, &[one, zero])?;
    let second = floquet_coefficients(&spec, mu2, &[zero, one])?;
    let closed_form_deviation = if det_vanishes(a) {
        let f = diagonal_closed_form(seq, mu1, mu2, a, order)?;
        let g: Vec<[C64; 2]> = diagonal_closed_form(seq, mu2, mu1, &swapped(a), order)?
            .into_iter()
            .map(|[x, y]| [y, x])
            .collect();
        Some(max_relative_gap(&f, &first).max(max_relative_gap(&g, &second)))
    } else {
        None
    };
    Ok(PlanarDiagonal {
        first,
        second,
        params: PlanarParams::new(a, Some(r1 - r2)),
        closed_form_deviation,
    })
}

/// Normalized coefficient defect of `z y' − (zA + B) y` for a log-power
/// vector, over `z`-degrees `0..=order`.
fn logpower_residual(
    entries: &[LogPowerSolution],
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    order: usize,
) -> Result<f64> {
    let mu = entries[0].mu();
    let shift = |f: &LogPowerSolution| -> LogPowerSolution {
        let terms = f
            .terms()
            .iter()
            .map(|(k, p)| {
                let mut q = vec![C64::new(0.0, 0.0)];
                q.extend(p.iter().copied());
                (*k, q)
            })
            .collect();
        LogPowerSolution::new(mu, terms)
    };
    let shifted: Vec<LogPowerSolution> = entries.iter().map(shift).collect();
    let size = entries.iter().map(|e| e.max_abs_coeff()).fold(0.0, f64::max);
    let scale = (1.0 + a.one_norm() + b.one_norm()) * size.max(1e-300);
    let mut worst: f64 = 0.0;
    for i in 0..entries.len() {
        let arow: Vec<C64> = (0..entries.len()).map(|j| a.get(i, j)).collect();
        let brow: Vec<C64> = (0..entries.len()).map(|j| b.get(i, j)).collect();
        let rhs = LogPowerSolution::linear_combination(mu, &arow, &shifted)?
            .try_add(&LogPowerSolution::linear_combination(mu, &brow, entries)?)?;
        let diff = entries[i].classical_derivative().try_sub(&rhs)?;
        for poly in diff.terms().values() {
            for c in poly.iter().take(order + 1) {
                worst = worst.max(c.norm() / scale);
            }
        }
    }
    Ok(worst)
}

fn second_solution(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    seq: &MomentSequence,
    mu: C64,
    order: usize,
    provider: Option<H3Provider>,
) -> Result<(SecondSolution, f64)> {
    let provider = resolve_provider(seq, provider)?;
    let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    if a.is_zero() {
        let column = match provider {
            H3Provider::Classical => {
                SolutionColumn::LogPower(vec![classical_h(1, mu), LogPowerSolution::monomial(mu)])
            }
            H3Provider::QTheta { q } => SolutionColumn::QTheta {
                functions: q_h_functions(q, mu, 1)?,
                weights: vec![vec![zero, one], vec![one, zero]],
            },
        };
        let defect = column.defect(b, seq)?;
        return Ok((SecondSolution::Column(column), defect));
    }
    if provider != H3Provider::Classical {
        return Err(Error::H3Unavailable(
            "the second solution for A ≠ 0 needs an H-function obeying the product rule".into(),
        ));
    }
    let minus_b = b.scale(C64::new(-1.0, 0.0));
    let mut s1 = vec![vec![zero, one]];
    let mut s2 = vec![vec![one, zero]];
    for p in 1..=order {
        let r = minus_b.shift(seq.ratio(mu + p as f64)?);
        let next2 = r.solve(&a.mul_vec(&s2[p - 1])?)?;
        let rhs: Vec<C64> = a.mul_vec(&s1[p - 1])?.iter().zip(&next2).map(|(x, y)| x - y).collect();
        s1.push(r.solve(&rhs)?);
        s2.push(next2);
    }
    let second = SecondSolution::LogSeries {
        regular: GeneralizedSeries::new(mu, s1)?,
        log_part: GeneralizedSeries::new(mu, s2)?,
    };
    let entries = second.entries().expect("log series has entries");
    let residual = logpower_residual(&entries, a, b, order)?;
    Ok((second, residual))
}

pub fn planar_jordan(
    a: &ComplexMatrix,
    seq: &MomentSequence,
    mu: C64,
    order: usize,
    provider: Option<H3Provider>,
) -> Result<PlanarJordan> {
    require_planar(a)?;
    require_re(mu)?;
    let e = seq.ratio(mu)?;
    let b = ComplexMatrix::from_rows(&[vec![e, C64::new(1.0, 0.0)], vec![C64::new(0.0, 0.0), e]])?;
    non_resonant(&b, seq, mu)?;
    let spec = ProblemSpec::new(a.clone(), b.clone(), seq.clone(), order)?;
    let first = floquet_coefficients(&spec, mu, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
    let closed_form_deviation = if det_vanishes(a) {
        Some(max_relative_gap(&jordan_closed_form(seq, mu, a, order)?, &first))
    } else {
        None
    };
    let (second, second_residual, note) = match second_solution(a, &b, seq, mu, order, provider) {
        Ok((s, r)) => (Some(s), Some(r), None),
        Err(e @ Error::H3Unavailable(_)) => (None, None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(PlanarJordan {
        first,
        second,
        second_residual,
        note,
        params: PlanarParams::new(a, None),
        closed_form_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn m(rows: [[f64; 2]; 2]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
    }

    #[test]
    fn diagonal_first_terms() {
        let seq = MomentSequence::Catalan;
        let (mu1, mu2) = (c(1.0, 0.0), c(2.5, 0.0));
        let a = m([[0.3, 0.2], [0.5, -0.1]]);
        let out = planar_diagonal(&a, &seq, mu1, mu2, 6).unwrap();
        let r = |z: C64| seq.ratio(z).unwrap();
        let beta = r(mu1) - r(mu2);
        let s1 = &out.first.series.coeffs()[1];
        assert!((s1[0] - c(0.3, 0.0) / (r(mu1 + 1.0) - r(mu1))).norm() < 1e-14);
        assert!((s1[1] - c(0.5, 0.0) / (r(mu1 + 1.0) - r(mu1) + beta)).norm() < 1e-14);
        assert!(out.closed_form_deviation.is_none());
    }

    #[test]
    fn diagonal_closed_forms_match() {
        let seq = MomentSequence::q_factorial(1.5).unwrap();
        let (mu1, mu2) = (c(1.2, 0.0), c(2.9, 0.0));
        // λ ≠ 0 and λ = 0 with det A = 0
        for a in [m([[0.4, 0.6], [0.2, 0.3]]), m([[1.0, 1.0], [-1.0, -1.0]])] {
            let out = planar_diagonal(&a, &seq, mu1, mu2, 12).unwrap();
            assert!(out.closed_form_deviation.unwrap() <= 1e-10);
        }
    }

    #[test]
    fn zero_a_is_trivial() {
        let out = planar_diagonal(&ComplexMatrix::zeros(2), &MomentSequence::Factorial, c(1.5, 0.0), c(2.25, 0.0), 5).unwrap();
        assert!(out.first.series.coeffs()[1..].iter().all(|s| s.iter().all(|x| x.norm() == 0.0)));
        assert_eq!(out.second.s0(), &[c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn diagonal_resonance() {
        assert!(matches!(
            planar_diagonal(&ComplexMatrix::identity(2), &MomentSequence::Factorial, c(1.0, 0.0), c(3.0, 0.0), 4),
            Err(Error::Resonant { p: 2, .. })
        ));
        assert!(planar_diagonal(&ComplexMatrix::identity(2), &MomentSequence::Factorial, c(0.5, 0.0), c(3.0, 0.0), 4).is_err());
    }

    #[test]
    fn jordan_first_terms_and_closed_form() {
        let seq = MomentSequence::Catalan;
        let mu = c(1.5, 0.0);
        let a = m([[0.8, -0.4], [1.0, -0.5]]);
        let out = planar_jordan(&a, &seq, mu, 12, None).unwrap();
        let d1 = seq.ratio(mu + 1.0).unwrap() - seq.ratio(mu).unwrap();
        let s1 = &out.first.series.coeffs()[1];
        assert!((s1[1] - c(1.0, 0.0) / d1).norm() < 1e-14);
        assert!((s1[0] - (c(0.8, 0.0) + c(1.0, 0.0) / d1) / d1).norm() < 1e-14);
        assert!(out.closed_form_deviation.unwrap() <= 1e-10);
        assert!(out.second.is_none());
        assert!(out.note.unwrap().contains("H-function"));
    }

    #[test]
    fn classical_second_solution() {
        let mu = c(2.0, 0.0);
        let zero = planar_jordan(&ComplexMatrix::zeros(2), &MomentSequence::Factorial, mu, 6, None).unwrap();
        assert_eq!(zero.second_residual, Some(0.0));
        let entries = zero.second.unwrap().entries().unwrap();
        assert_eq!(entries, vec![classical_h(1, mu), LogPowerSolution::monomial(mu)]);

        let a = m([[0.3, -0.7], [0.4, 0.2]]);
        let full = planar_jordan(&a, &MomentSequence::Factorial, mu, 15, None).unwrap();
        assert!(full.second_residual.unwrap() <= 1e-13);
    }

    #[test]
    fn q_second_solution() {
        let seq = MomentSequence::q_factorial(2.0).unwrap();
        let out = planar_jordan(&ComplexMatrix::zeros(2), &seq, c(1.0, 0.0), 4, None).unwrap();
        assert!(out.second_residual.unwrap() <= 1e-8);
        let busy = planar_jordan(&ComplexMatrix::identity(2), &seq, c(1.0, 0.0), 4, None).unwrap();
        assert!(busy.second.is_none());
    }
}
