//! Small dense complex matrices.

mod eigen;
mod jordan;

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

pub use eigen::{eigen, EigenCluster, EigenPair, SpectralData};
pub use jordan::{jordan, jordan_with_tolerance, JordanBlock, JordanDecomposition};

use crate::{Error, Result, C64};

/// Default relative tolerance for spectral predicates.
pub const EPS_SPEC: f64 = 1e-9;
/// Pivots below this multiple of `‖M‖₁` count as zero.
pub const PIVOT_THRESHOLD: f64 = 1e-13;
/// Largest supported dimension.
pub const MAX_DIM: usize = 64;

/// Square complex matrix, `n ≥ 1`, finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl ComplexMatrix {
    /// Builds from row-major entries.
    pub fn new(n: usize, row_major: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("matrix dimension must be at least 1".into()));
        }
        if row_major.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: row_major.len(),
            });
        }
        if row_major.iter().any(|z| !crate::is_finite(*z)) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(n, n, &row_major)))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diag(values: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)))
    }

    pub fn scalar(n: usize, value: C64) -> Self {
        Self::identity(n).scale(value)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.n())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn row_major(&self) -> Vec<C64> {
        self.rows().into_iter().flatten().collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let n = cols.len();
        let mut m = Self::zeros(n.max(1));
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        Ok(m)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    /// `M + cI`.
    pub fn shift(&self, c: C64) -> Self {
        let mut m = self.0.clone();
        for i in 0..self.n() {
            m[(i, i)] += c;
        }
        Self(m)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Largest column sum of moduli.
    pub fn one_norm(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.norm() == 0.0)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.n() == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other,
            })
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n())?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n())?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(v.len())?;
        Ok((0..self.n())
            .map(|i| (0..self.n()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect())
    }

    fn lu(&self) -> Result<nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>> {
        let threshold = PIVOT_THRESHOLD * self.one_norm();
        let lu = self.0.clone().lu();
        let u = lu.u();
        let pivot = u.diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        if pivot <= threshold {
            return Err(Error::SingularMatrix { pivot, threshold });
        }
        Ok(lu)
    }

    /// Inverse by partial-pivot elimination.
    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        lu.try_inverse()
            .map(Self)
            .ok_or(Error::SingularMatrix {
                pivot: 0.0,
                threshold: 0.0,
            })
    }

    pub fn solve(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(rhs.len())?;
        let lu = self.lu()?;
        let b = nalgebra::DVector::from_column_slice(rhs);
        lu.solve(&b)
            .map(|x| x.iter().copied().collect())
            .ok_or(Error::SingularMatrix {
                pivot: 0.0,
                threshold: 0.0,
            })
    }

    /// Determinant from the same elimination used by [`inverse`](Self::inverse).
    pub fn det(&self) -> C64 {
        self.0.clone().lu().determinant()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Vector 1-norm.
pub fn vec_norm1(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// `‖AB − BA‖₁ ≤ 1e-12 (1 + ‖A‖₁ ‖B‖₁)`.
pub fn commute(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<bool> {
    Ok(commutator_defect(a, b)? <= 1e-12 * (1.0 + a.one_norm() * b.one_norm()))
}

pub fn commutator_defect(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let ab = a.try_mul(b)?;
    let ba = b.try_mul(a)?;
    Ok((&ab - &ba).one_norm())
}

/// Rank of a set of vectors via singular values, relative to the largest.
pub fn rank(vectors: &[Vec<C64>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let rows = vectors[0].len();
    let m = DMatrix::from_fn(rows, vectors.len(), |i, j| vectors[j][i]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn m(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn one_norm_examples() {
        assert_eq!(ComplexMatrix::identity(2).one_norm(), 1.0);
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(-2.0, 0.0)],
            vec![c(0.0, 3.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(a.one_norm(), 4.0);
        assert_eq!(m(&[&[1.0, -1.0], &[0.0, 1.0]]).one_norm(), 2.0);
    }

    #[test]
    fn inverse_examples() {
        let d = 3.0;
        let inv = m(&[&[d, -1.0], &[0.0, d]]).inverse().unwrap();
        let expected = m(&[&[1.0 / d, 1.0 / (d * d)], &[0.0, 1.0 / d]]);
        assert!((&inv - &expected).one_norm() < 1e-15);
        assert_eq!(ComplexMatrix::identity(3).inverse().unwrap(), ComplexMatrix::identity(3));
        assert!(matches!(
            m(&[&[1.0, 1.0], &[1.0, 1.0]]).inverse(),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(matches!(
            ComplexMatrix::zeros(2).inverse(),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn construction_checks() {
        assert!(ComplexMatrix::new(0, vec![]).is_err());
        assert!(ComplexMatrix::new(2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(1, vec![c(f64::NAN, 0.0)]).is_err());
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(a.get(0, 1), c(2.0, 0.0));
        assert_eq!(a.row_major()[2], c(3.0, 0.0));
        assert_eq!(a.column(1), vec![c(2.0, 0.0), c(4.0, 0.0)]);
        assert!((a.det() - c(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn commute_examples() {
        let b = m(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert!(commute(&ComplexMatrix::identity(2), &b).unwrap());
        assert!(!commute(&m(&[&[0.0, 1.0], &[0.0, 0.0]]), &b).unwrap());
        assert!(commute(&b, &b).unwrap());
        assert!(matches!(
            commute(&b, &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_and_rank() {
        let a = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = a.solve(&[c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-14 && (x[1] - c(1.0, 0.0)).norm() < 1e-14);
        let v = vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(2.0, 0.0)]];
        assert_eq!(rank(&v, 1e-9), 1);
    }
}
