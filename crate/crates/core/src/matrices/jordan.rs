//! Jordan data for small or well-separated spectra, or verified from a hint.

use super::eigen::{eigen, CLUSTER_GAP};
use super::{ComplexMatrix, EPS_SPEC};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub offset: usize,
    pub size: usize,
    pub eigenvalue: C64,
}

/// `M = P J P⁻¹` with `J` block diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanDecomposition {
    pub p: ComplexMatrix,
    pub j: ComplexMatrix,
    pub block_sizes: Vec<usize>,
    pub block_eigenvalues: Vec<C64>,
}

impl JordanDecomposition {
    /// Builds `J` from block data and checks dimensions.
    pub fn from_blocks(p: ComplexMatrix, blocks: &[(usize, C64)]) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.0).sum();
        if n != p.n() || blocks.iter().any(|b| b.0 == 0) {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                found: n,
            });
        }
        let mut j = ComplexMatrix::zeros(n);
        let mut o = 0;
        for &(size, ev) in blocks {
            for i in 0..size {
                j.set(o + i, o + i, ev);
                if i + 1 < size {
                    j.set(o + i, o + i + 1, C64::new(1.0, 0.0));
                }
            }
            o += size;
        }
        Ok(Self {
            p,
            j,
            block_sizes: blocks.iter().map(|b| b.0).collect(),
            block_eigenvalues: blocks.iter().map(|b| b.1).collect(),
        })
    }

    /// Reads the block structure off a matrix already in Jordan form.
    pub fn from_jordan_matrix(p: ComplexMatrix, j: ComplexMatrix) -> Result<Self> {
        let blocks = parse_jordan(&j).ok_or_else(|| {
            Error::IllConditioned("J does not have exact Jordan block structure".into())
        })?;
        let d = Self::from_blocks(p, &blocks)?;
        if d.j != j {
            return Err(Error::IllConditioned("J does not match its block structure".into()));
        }
        Ok(d)
    }

    pub fn blocks(&self) -> Vec<JordanBlock> {
        let mut o = 0;
        self.block_sizes
            .iter()
            .zip(&self.block_eigenvalues)
            .map(|(&size, &eigenvalue)| {
                let b = JordanBlock {
                    offset: o,
                    size,
                    eigenvalue,
                };
                o += size;
                b
            })
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.block_sizes.iter().all(|&s| s == 1)
    }

    /// `‖MP − PJ‖₁`.
    pub fn defect(&self, m: &ComplexMatrix) -> Result<f64> {
        let mp = m.try_mul(&self.p)?;
        let pj = self.p.try_mul(&self.j)?;
        Ok((&mp - &pj).one_norm())
    }

    /// Checks `‖MP − PJ‖₁ ≤ eps (1 + ‖M‖₁) ‖P‖₁`, exact structure of `J` and
    /// invertibility of `P`.
    pub fn verify(&self, m: &ComplexMatrix, eps: f64) -> Result<()> {
        let tolerance = eps * (1.0 + m.one_norm()) * self.p.one_norm();
        let defect = self.defect(m)?;
        if defect.is_nan() || defect > tolerance {
            return Err(Error::HintRejected { defect, tolerance });
        }
        let rebuilt = Self::from_blocks(
            self.p.clone(),
            &self
                .block_sizes
                .iter()
                .copied()
                .zip(self.block_eigenvalues.iter().copied())
                .collect::<Vec<_>>(),
        )?;
        if rebuilt.j != self.j {
            return Err(Error::HintRejected {
                defect: f64::INFINITY,
                tolerance,
            });
        }
        self.p.inverse().map_err(|_| Error::HintRejected {
            defect: f64::INFINITY,
            tolerance,
        })?;
        Ok(())
    }
}

/// Block sizes and eigenvalues if `j` is exactly in Jordan form.
fn parse_jordan(j: &ComplexMatrix) -> Option<Vec<(usize, C64)>> {
    let n = j.n();
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            if c != r && c != r + 1 && j.get(r, c) != zero {
                return None;
            }
        }
    }
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..n {
        let last = i + 1 == n;
        let link = if last { zero } else { j.get(i, i + 1) };
        if link == one && j.get(i, i) == j.get(i + 1, i + 1) {
            continue;
        }
        if link != zero {
            return None;
        }
        blocks.push((i + 1 - start, j.get(start, start)));
        start = i + 1;
    }
    Some(blocks)
}

/// Jordan decomposition with the default tolerance.
pub fn jordan(m: &ComplexMatrix, hint: Option<&JordanDecomposition>) -> Result<JordanDecomposition> {
    jordan_with_tolerance(m, hint, EPS_SPEC)
}

pub fn jordan_with_tolerance(
    m: &ComplexMatrix,
    hint: Option<&JordanDecomposition>,
    eps: f64,
) -> Result<JordanDecomposition> {
    if let Some(h) = hint {
        h.verify(m, eps)?;
        return Ok(h.clone());
    }
    let n = m.n();
    if let Some(blocks) = parse_jordan(m) {
        return JordanDecomposition::from_blocks(ComplexMatrix::identity(n), &blocks);
    }
    let spec = eigen(m)?;
    let clustered = spec.clusters.iter().any(|c| c.multiplicity > 1);
    let decomposition = if !clustered {
        let cols: Vec<Vec<C64>> = spec.clusters.iter().map(|c| c.vectors[0].clone()).collect();
        let blocks: Vec<(usize, C64)> = spec.clusters.iter().map(|c| (1, c.value)).collect();
        JordanDecomposition::from_blocks(ComplexMatrix::from_columns(&cols)?, &blocks)?
    } else if n == 2 {
        let lambda = spec.clusters[0].value;
        let nil = m.shift(-lambda);
        if nil.one_norm() <= CLUSTER_GAP * spec.scale {
            JordanDecomposition::from_blocks(ComplexMatrix::identity(2), &[(1, lambda), (1, lambda)])?
        } else {
            // chain [N e_k, e_k] through the column where N is largest
            let k = if vec_norm(&nil.column(0)) >= vec_norm(&nil.column(1)) { 0 } else { 1 };
            let mut e = vec![C64::new(0.0, 0.0); 2];
            e[k] = C64::new(1.0, 0.0);
            let p = ComplexMatrix::from_columns(&[nil.column(k), e])?;
            JordanDecomposition::from_blocks(p, &[(2, lambda)])?
        }
    } else {
        return Err(Error::IllConditioned(format!(
            "clustered eigenvalues in dimension {n}; supply a Jordan hint"
        )));
    };
    decomposition
        .verify(m, eps)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    Ok(decomposition)
}

fn vec_norm(v: &[C64]) -> f64 {
    super::vec_norm1(v)
}
