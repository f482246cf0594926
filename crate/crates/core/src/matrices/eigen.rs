//! Eigenvalues from a complex Schur form, eigenvectors from null spaces.

use nalgebra::DMatrix;

use super::{ComplexMatrix, EPS_SPEC, MAX_DIM};
use crate::{Error, Result, C64};

/// Relative gap below which computed eigenvalues are treated as one cluster.
pub(crate) const CLUSTER_GAP: f64 = 1e-6;
const NULL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    pub vector: Vec<C64>,
    /// `‖Mv − λv‖₁ / ‖v‖₁`.
    pub residual: f64,
}

/// Eigenvalues closer than the cluster gap, with their mean and eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    pub value: C64,
    pub multiplicity: usize,
    pub vectors: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// With multiplicity, sorted by `(Re, Im)`.
    pub eigenvalues: Vec<C64>,
    pub pairs: Vec<EigenPair>,
    pub clusters: Vec<EigenCluster>,
    /// `1 + ‖M‖₁`.
    pub scale: f64,
}

impl SpectralData {
    pub fn eigenvectors(&self) -> Vec<Vec<C64>> {
        self.pairs.iter().map(|p| p.vector.clone()).collect()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.residual).collect()
    }

    /// Distance from `x` to the nearest cluster.
    pub fn distance(&self, x: C64) -> f64 {
        self.clusters
            .iter()
            .map(|c| (c.value - x).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `x ∈ spec(M)` within `eps · (1 + ‖M‖₁)`.
    pub fn contains(&self, x: C64, eps: f64) -> bool {
        self.distance(x) <= eps * self.scale
    }

    pub fn cluster_near(&self, x: C64, eps: f64) -> Option<&EigenCluster> {
        self.clusters
            .iter()
            .filter(|c| (c.value - x).norm() <= eps * self.scale)
            .min_by(|a, b| {
                (a.value - x)
                    .norm()
                    .partial_cmp(&(b.value - x).norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }
}

/// Reduced column echelon form: each vector gets a unit entry at its own
/// pivot row and zeros at the other vectors' pivot rows.
fn canonical_basis(mut cols: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    let k = cols.len();
    if k == 0 {
        return cols;
    }
    let n = cols[0].len();
    let top = cols
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let tol = 1e-8 * top;
    let mut pivot_rows = Vec::new();
    let mut done = 0;
    for r in 0..n {
        if done == k {
            break;
        }
        let (best, mag) = (done..k)
            .map(|c| (c, cols[c][r].norm()))
            .fold((done, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol {
            continue;
        }
        cols.swap(done, best);
        let p = cols[done][r];
        for v in cols[done].iter_mut() {
            *v /= p;
        }
        for c in 0..k {
            if c != done {
                let f = cols[c][r];
                if f.norm() != 0.0 {
                    let pivot = cols[done].clone();
                    for (x, d) in cols[c].iter_mut().zip(pivot) {
                        *x -= f * d;
                    }
                }
            }
        }
        pivot_rows.push(r);
        done += 1;
    }
    // exact zeros at foreign pivot rows and an exact one on its own
    for (c, &r) in pivot_rows.iter().enumerate() {
        for (c2, col) in cols.iter_mut().enumerate().take(done) {
            col[r] = if c2 == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        }
    }
    cols.truncate(done);
    cols
}

/// Null space of `M − λI`, at least one vector.
fn null_space(m: &ComplexMatrix, lambda: C64, tol: f64) -> Vec<Vec<C64>> {
    let n = m.n();
    let shifted = m.shift(-lambda);
    let svd = shifted.inner().clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let take = order
        .iter()
        .filter(|&&i| svd.singular_values[i] <= tol)
        .count()
        .max(1);
    let raw: Vec<Vec<C64>> = order[..take]
        .iter()
        .map(|&i| (0..n).map(|j| v_t[(i, j)].conj()).collect())
        .collect();
    canonical_basis(raw)
}

fn cluster(values: &[C64], gap: f64) -> Vec<Vec<C64>> {
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for &v in values {
        let home = groups
            .iter()
            .position(|g| g.iter().any(|w| (w - v).norm() <= gap));
        match home {
            Some(i) => groups[i].push(v),
            None => groups.push(vec![v]),
        }
    }
    // merge groups linked transitively
    let mut merged = true;
    while merged {
        merged = false;
        'outer: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let linked = groups[i]
                    .iter()
                    .any(|a| groups[j].iter().any(|b| (a - b).norm() <= gap));
                if linked {
                    let g = groups.remove(j);
                    groups[i].extend(g);
                    merged = true;
                    break 'outer;
                }
            }
        }
    }
    groups
}

fn sort_values(v: &mut [C64]) {
    v.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Raw eigenvalues via Hessenberg reduction and shifted QR on the complex
/// Schur form.
pub(crate) fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = m.n();
    if n > MAX_DIM {
        return Err(Error::Domain(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    let schur = nalgebra::linalg::Schur::try_new(m.inner().clone(), f64::EPSILON, 500 * n)
        .ok_or_else(|| Error::Convergence(format!("QR iteration cap {} reached", 500 * n)))?;
    let (_, t): (DMatrix<C64>, DMatrix<C64>) = schur.unpack();
    let mut vals: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    sort_values(&mut vals);
    Ok(vals)
}

/// Eigenvalues with multiplicity and one normalized eigenvector per
/// geometric dimension of each cluster.
pub fn eigen(m: &ComplexMatrix) -> Result<SpectralData> {
    let vals = eigenvalues(m)?;
    let scale = 1.0 + m.one_norm();
    let mut clusters = Vec::new();
    let mut pairs = Vec::new();
    for group in cluster(&vals, CLUSTER_GAP * scale) {
        let mean = group.iter().sum::<C64>() / group.len() as f64;
        let vectors: Vec<Vec<C64>> = null_space(m, mean, NULL_TOL * scale)
            .into_iter()
            .take(group.len())
            .collect();
        for v in &vectors {
            let mv = m.mul_vec(v)?;
            let r: f64 = mv.iter().zip(v).map(|(a, b)| (a - mean * b).norm()).sum();
            pairs.push(EigenPair {
                value: mean,
                vector: v.clone(),
                residual: r / super::vec_norm1(v),
            });
        }
        clusters.push(EigenCluster {
            value: mean,
            multiplicity: group.len(),
            vectors,
        });
    }
    clusters.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pairs.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let data = SpectralData {
        eigenvalues: vals,
        pairs,
        clusters,
        scale,
    };
    if let Some(bad) = data.pairs.iter().find(|p| p.residual > EPS_SPEC * scale) {
        return Err(Error::Convergence(format!(
            "eigenvector residual {:.3e} for eigenvalue {}",
            bad.residual, bad.value
        )));
    }
    Ok(data)
}
