//! Coefficient kinds carried by series: scalars, vectors and matrices.

use crate::matrices::ComplexMatrix;
use crate::{Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Scalar,
    Vector(usize),
    Matrix(usize),
}

impl Shape {
    /// Number of scalar components.
    pub fn len(&self) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Vector(n) => *n,
            Shape::Matrix(n) => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Linear-space operations needed by series arithmetic.
pub trait Coefficient: Clone + std::fmt::Debug + PartialEq {
    fn shape(&self) -> Shape;
    fn zero_like(&self) -> Self;
    /// Same-shape sum; callers check shapes first.
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: C64) -> Self;
    fn norm1(&self) -> f64;
    /// Row-major scalar components.
    fn components(&self) -> Vec<C64>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    fn all_finite(&self) -> bool {
        self.components().iter().all(|z| crate::is_finite(*z))
    }
}

impl Coefficient for C64 {
    fn shape(&self) -> Shape {
        Shape::Scalar
    }
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn norm1(&self) -> f64 {
        self.norm()
    }
    fn components(&self) -> Vec<C64> {
        vec![*self]
    }
}

impl Coefficient for Vec<C64> {
    fn shape(&self) -> Shape {
        Shape::Vector(self.len())
    }
    fn zero_like(&self) -> Self {
        vec![C64::new(0.0, 0.0); self.len()]
    }
    fn add(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
    fn scale(&self, c: C64) -> Self {
        self.iter().map(|a| a * c).collect()
    }
    fn norm1(&self) -> f64 {
        crate::matrices::vec_norm1(self)
    }
    fn components(&self) -> Vec<C64> {
        self.clone()
    }
}

impl Coefficient for ComplexMatrix {
    fn shape(&self) -> Shape {
        Shape::Matrix(self.n())
    }
    fn zero_like(&self) -> Self {
        ComplexMatrix::zeros(self.n())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: C64) -> Self {
        ComplexMatrix::scale(self, c)
    }
    fn norm1(&self) -> f64 {
        self.one_norm()
    }
    fn components(&self) -> Vec<C64> {
        self.row_major()
    }
}

/// Products of coefficients used by the Cauchy product.
pub trait CoeffMul<R> {
    type Output: Coefficient;
    fn mul(&self, rhs: &R) -> Result<Self::Output>;
}

impl CoeffMul<C64> for C64 {
    type Output = C64;
    fn mul(&self, rhs: &C64) -> Result<C64> {
        Ok(self * rhs)
    }
}

impl CoeffMul<Vec<C64>> for C64 {
    type Output = Vec<C64>;
    fn mul(&self, rhs: &Vec<C64>) -> Result<Vec<C64>> {
        Ok(rhs.scale(*self))
    }
}

impl CoeffMul<ComplexMatrix> for C64 {
    type Output = ComplexMatrix;
    fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(rhs.scale(*self))
    }
}

impl CoeffMul<Vec<C64>> for ComplexMatrix {
    type Output = Vec<C64>;
    fn mul(&self, rhs: &Vec<C64>) -> Result<Vec<C64>> {
        self.mul_vec(rhs)
    }
}

impl CoeffMul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.try_mul(rhs)
    }
}
