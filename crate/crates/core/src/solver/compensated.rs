//! Double-double accumulation for the Floquet recursion. Each coefficient
//! carries a low-order correction so that `A s_{p−1}` keeps full relative
//! accuracy even when it cancels.

use crate::matrices::ComplexMatrix;
use crate::{Result, C64};

/// Refinement sweeps per recursion step.
const SWEEPS: usize = 2;

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Debug, Clone, Copy, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn add(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    fn add_prod(self, a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        self.add(p).add(e)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct DdComplex {
    re: Dd,
    im: Dd,
}

impl DdComplex {
    fn add_mul(self, a: C64, b: C64) -> Self {
        Self {
            re: self.re.add_prod(a.re, b.re).add_prod(-a.im, b.im),
            im: self.im.add_prod(a.re, b.im).add_prod(a.im, b.re),
        }
    }

    fn rounded(self) -> C64 {
        C64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }
}

/// A vector stored as `hi + lo`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SplitVec {
    pub hi: Vec<C64>,
    pub lo: Vec<C64>,
}

impl SplitVec {
    pub fn exact(v: &[C64]) -> Self {
        Self {
            hi: v.to_vec(),
            lo: vec![C64::new(0.0, 0.0); v.len()],
        }
    }
}

/// `m · (x.hi + x.lo) − base`, accumulated in double-double.
fn product(m: &ComplexMatrix, x: &SplitVec, base: Option<&[DdComplex]>) -> Vec<DdComplex> {
    (0..m.n())
        .map(|i| {
            let start = base.map_or_else(DdComplex::default, |b| {
                let DdComplex { re, im } = b[i];
                DdComplex {
                    re: Dd { hi: -re.hi, lo: -re.lo },
                    im: Dd { hi: -im.hi, lo: -im.lo },
                }
            });
            (0..m.n()).fold(start, |acc, j| {
                let mij = m.get(i, j);
                acc.add_mul(mij, x.hi[j]).add_mul(mij, x.lo[j])
            })
        })
        .collect()
}

/// Solves `m x = a · prev` with the right side formed exactly and the
/// solution refined against the double-double residual.
pub(crate) fn refined_step(m: &ComplexMatrix, a: &ComplexMatrix, prev: &SplitVec) -> Result<SplitVec> {
    let rhs = product(a, prev, None);
    let hi = m.solve(&rhs.iter().map(|z| z.rounded()).collect::<Vec<_>>())?;
    let mut x = SplitVec::exact(&hi);
    for _ in 0..SWEEPS {
        // m x − rhs, so the correction enters with a minus sign
        let excess: Vec<C64> = product(m, &x, Some(&rhs)).iter().map(|z| z.rounded()).collect();
        let delta = m.solve(&excess)?;
        for ((h, l), d) in x.hi.iter_mut().zip(x.lo.iter_mut()).zip(&delta) {
            let (re, re_lo) = two_sum(h.re, l.re - d.re);
            let (im, im_lo) = two_sum(h.im, l.im - d.im);
            *h = C64::new(re, im);
            *l = C64::new(re_lo, im_lo);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn recovers_cancelled_product() {
        // a · (1, 1 + 2⁻⁶⁰) = 2⁻⁶⁰ exactly; the split carries the tail
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, -1.0], vec![0.0, 0.0]]).unwrap();
        let prev = SplitVec {
            hi: vec![c(1.0, 0.0), c(1.0, 0.0)],
            lo: vec![c(0.0, 0.0), c(2f64.powi(-60), 0.0)],
        };
        let x = refined_step(&ComplexMatrix::identity(2), &a, &prev).unwrap();
        assert_eq!(x.hi[0], c(-(2f64.powi(-60)), 0.0));
    }

    #[test]
    fn refinement_reaches_working_precision() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(3.0, 1.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(3.0, 1.0)],
        ])
        .unwrap();
        let x = refined_step(&m, &ComplexMatrix::identity(2), &SplitVec::exact(&[c(1.0, 0.0), c(0.5, -0.25)])).unwrap();
        let back = m.mul_vec(&x.hi).unwrap();
        assert!((back[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((back[1] - c(0.5, -0.25)).norm() < 1e-15);
    }
}
