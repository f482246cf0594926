//! The generalized matrix power `z_m^B`, whose columns solve `z ∂ₘ y = B y`.

use super::qtheta::{q_h_functions, QHFunctions};
use super::{resolve_provider, H3Provider};
use crate::matrices::{eigen, jordan, ComplexMatrix, JordanDecomposition, SpectralData};
use crate::moments::{solve_ratio_equation, MomentSequence, Region};
use crate::series::{principal_power, LogPowerSolution};
use crate::solver::{check_h1_with, DEFAULT_P_MAX};
use crate::matrices::EPS_SPEC;
use crate::{Error, Result, C64};

/// `z^μ logᵖ z / p!`.
pub fn classical_h(p: usize, mu: C64) -> LogPowerSolution {
    let fact: f64 = (1..=p).map(|k| k as f64).product();
    LogPowerSolution::single(mu, p, vec![C64::new(1.0 / fact, 0.0)])
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionColumn {
    /// `s₀ z^μ`.
    Monomial { s0: Vec<C64>, mu: C64 },
    /// One log-power entry per row, all with the same exponent.
    LogPower(Vec<LogPowerSolution>),
    /// Row `i` is `Σ_k weights[i][k] H_{k+1}`.
    QTheta {
        functions: QHFunctions,
        weights: Vec<Vec<C64>>,
    },
}

impl SolutionColumn {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Monomial { .. } => "monomial",
            Self::LogPower(_) => "logpower",
            Self::QTheta { .. } => "qtheta",
        }
    }

    pub fn mu(&self) -> C64 {
        match self {
            Self::Monomial { mu, .. } => *mu,
            Self::LogPower(entries) => entries[0].mu(),
            Self::QTheta { functions, .. } => functions.mu,
        }
    }

    pub fn evaluate(&self, z: C64) -> Result<Vec<C64>> {
        match self {
            Self::Monomial { s0, mu } => {
                let w = principal_power(z, *mu)?;
                Ok(s0.iter().map(|s| s * w).collect())
            }
            Self::LogPower(entries) => entries.iter().map(|e| e.evaluate(z)).collect(),
            Self::QTheta { functions, weights } => {
                let hs = (1..=functions.count + 1)
                    .map(|k| functions.h(k, z))
                    .collect::<Result<Vec<_>>>()?;
                Ok(weights
                    .iter()
                    .map(|row| row.iter().zip(&hs).map(|(w, h)| w * h).sum())
                    .collect())
            }
        }
    }

    /// Normalized defect of `z ∂ₘ y = B y`: coefficientwise for monomial and
    /// log-power columns, on sample points for theta columns.
    pub(crate) fn defect(&self, b: &ComplexMatrix, seq: &MomentSequence) -> Result<f64> {
        let scale = 1.0 + b.one_norm();
        match self {
            Self::Monomial { s0, mu } => {
                let r = seq.ratio(*mu)?;
                let bs = b.mul_vec(s0)?;
                let d: f64 = bs.iter().zip(s0).map(|(x, s)| (x - r * s).norm()).sum();
                Ok(d / (scale * crate::matrices::vec_norm1(s0)))
            }
            Self::LogPower(entries) => {
                if !matches!(seq, MomentSequence::Factorial) {
                    return Err(Error::H3Unavailable(format!(
                        "log-power columns realize the factorial sequence, not {seq}"
                    )));
                }
                let mu = entries[0].mu();
                let size = entries.iter().map(|e| e.max_abs_coeff()).fold(0.0, f64::max);
                let mut worst: f64 = 0.0;
                for (i, e) in entries.iter().enumerate() {
                    let row: Vec<C64> = (0..entries.len()).map(|j| b.get(i, j)).collect();
                    let by = LogPowerSolution::linear_combination(mu, &row, entries)?;
                    worst = worst.max(e.classical_derivative().try_sub(&by)?.max_abs_coeff());
                }
                Ok(if size == 0.0 { 0.0 } else { worst / (scale * size) })
            }
            Self::QTheta { functions, .. } => {
                let q = functions.q;
                let mut worst: f64 = 0.0;
                for z in spiral_points() {
                    let y = self.evaluate(z)?;
                    let yq = self.evaluate(z * q)?;
                    let by = b.mul_vec(&y)?;
                    let size = y.iter().map(|v| v.norm()).fold(1.0, f64::max);
                    for i in 0..y.len() {
                        let jackson = (yq[i] - y[i]) / (q - 1.0);
                        worst = worst.max((jackson - by[i]).norm() / (scale * size));
                    }
                }
                Ok(worst)
            }
        }
    }
}

/// Sample points off the positive real axis.
fn spiral_points() -> impl Iterator<Item = C64> {
    (0..12).map(|i| C64::from_polar(0.3 + 0.2 * i as f64, 0.4 + 0.45 * i as f64))
}

/// Columns of `z_m^B` with the Jordan data they were assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSolutionMatrix {
    pub columns: Vec<SolutionColumn>,
    pub decomposition: JordanDecomposition,
    /// Largest normalized column defect found when the matrix was built.
    pub defect: f64,
}

impl SymbolicSolutionMatrix {
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn evaluate(&self, z: C64) -> Result<ComplexMatrix> {
        let cols = self
            .columns
            .iter()
            .map(|c| c.evaluate(z))
            .collect::<Result<Vec<_>>>()?;
        ComplexMatrix::from_columns(&cols)
    }

    /// Largest normalized defect of `z ∂ₘ y = B y` over the columns.
    pub fn verify(&self, b: &ComplexMatrix, seq: &MomentSequence) -> Result<f64> {
        self.columns
            .iter()
            .try_fold(0.0f64, |acc, c| Ok(acc.max(c.defect(b, seq)?)))
    }

    fn assemble(
        columns: Vec<SolutionColumn>,
        decomposition: JordanDecomposition,
        b: &ComplexMatrix,
        seq: &MomentSequence,
    ) -> Result<Self> {
        let mut m = Self {
            columns,
            decomposition,
            defect: 0.0,
        };
        m.defect = m.verify(b, seq)?;
        Ok(m)
    }
}

/// First root of `ratio(μ) = e` in `region` for which (H1) holds on `spectrum`.
fn admissible_exponent(
    spectrum: &SpectralData,
    seq: &MomentSequence,
    e: C64,
    region: &Region,
) -> Result<C64> {
    let roots = solve_ratio_equation(seq, e, region)?;
    let mut first_resonance = None;
    for &mu in &roots {
        let v = check_h1_with(spectrum, seq, mu, DEFAULT_P_MAX, EPS_SPEC)?;
        if v.holds {
            return Ok(mu);
        }
        if first_resonance.is_none() {
            first_resonance = v.resonances.first().map(|&p| (mu, p));
        }
    }
    Err(match first_resonance {
        Some((mu, p)) => Error::Resonant { mu, p },
        None => Error::NoExponentFound(e),
    })
}

fn pivot_row(v: &[C64]) -> usize {
    v.iter().position(|x| x.norm() > 0.0).unwrap_or(v.len())
}

/// `(s_{0,1} z^{μ_1}, …, s_{0,n} z^{μ_n})` for diagonalizable `B`.
pub fn zmb_diagonalizable(b: &ComplexMatrix, seq: &MomentSequence, region: &Region) -> Result<SymbolicSolutionMatrix> {
    let spectrum = eigen(b)?;
    let found: usize = spectrum.clusters.iter().map(|c| c.vectors.len()).sum();
    if found < b.n() {
        return Err(Error::Domain(format!(
            "B has only {found} independent eigenvectors in dimension {}; use the Jordan construction",
            b.n()
        )));
    }
    let mut pairs: Vec<(Vec<C64>, C64, C64)> = Vec::new();
    for cluster in &spectrum.clusters {
        let mu = admissible_exponent(&spectrum, seq, cluster.value, region)?;
        for v in &cluster.vectors {
            pairs.push((v.clone(), mu, cluster.value));
        }
    }
    pairs.sort_by_key(|(v, _, _)| pivot_row(v));
    let p = ComplexMatrix::from_columns(&pairs.iter().map(|x| x.0.clone()).collect::<Vec<_>>())?;
    let blocks: Vec<(usize, C64)> = pairs.iter().map(|x| (1, x.2)).collect();
    let decomposition = JordanDecomposition::from_blocks(p, &blocks)?;
    let columns = pairs
        .into_iter()
        .map(|(s0, mu, _)| SolutionColumn::Monomial { s0, mu })
        .collect();
    SymbolicSolutionMatrix::assemble(columns, decomposition, b, seq)
}

/// Block-by-block construction of `P z_m^J` with H-functions from `provider`
/// (inferred from `seq` when absent).
pub fn zmb_general(
    b: &ComplexMatrix,
    seq: &MomentSequence,
    region: &Region,
    provider: Option<H3Provider>,
    hint: Option<&JordanDecomposition>,
) -> Result<SymbolicSolutionMatrix> {
    let decomposition = jordan(b, hint)?;
    if decomposition.is_diagonal() && hint.is_none() {
        return zmb_diagonalizable(b, seq, region);
    }
    let provider = if decomposition.is_diagonal() {
        None
    } else {
        Some(resolve_provider(seq, provider)?)
    };
    let spectrum = eigen(b)?;
    let p = &decomposition.p;
    let n = b.n();
    let mut columns = Vec::with_capacity(n);
    for block in decomposition.blocks() {
        let mu = admissible_exponent(&spectrum, seq, block.eigenvalue, region)?;
        let lead = p.column(block.offset);
        columns.push(SolutionColumn::Monomial { s0: lead, mu });
        for j in 2..=block.size {
            // rows offset+i carry H_{j−i} for i < j
            let column = match provider {
                Some(H3Provider::Classical) => {
                    let entries = (0..n)
                        .map(|r| {
                            let weights: Vec<C64> = (0..j).map(|i| p.get(r, block.offset + i)).collect();
                            let hs: Vec<LogPowerSolution> = (0..j).map(|i| classical_h(j - i - 1, mu)).collect();
                            LogPowerSolution::linear_combination(mu, &weights, &hs)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    SolutionColumn::LogPower(entries)
                }
                Some(H3Provider::QTheta { q }) => {
                    let functions = q_h_functions(q, mu, block.size - 1)?;
                    let weights = (0..n)
                        .map(|r| {
                            let mut w = vec![C64::new(0.0, 0.0); block.size];
                            for i in 0..j {
                                w[j - i - 1] += p.get(r, block.offset + i);
                            }
                            w
                        })
                        .collect();
                    SolutionColumn::QTheta { functions, weights }
                }
                None => unreachable!("non-trivial blocks always resolve a provider"),
            };
            columns.push(column);
        }
    }
    SymbolicSolutionMatrix::assemble(columns, decomposition, b, seq)
}
