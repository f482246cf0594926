//! Finite sums `Σ_k c_k(z) z^μ log^k z` with polynomial `c_k`.

use std::collections::BTreeMap;

use super::principal_power;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct LogPowerSolution {
    mu: C64,
    /// log power → polynomial coefficients in `z`, lowest degree first.
    terms: BTreeMap<usize, Vec<C64>>,
}

fn trim(mut poly: Vec<C64>) -> Vec<C64> {
    while poly.last().is_some_and(|c| c.norm() == 0.0) {
        poly.pop();
    }
    poly
}

fn poly_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
        .collect()
}

impl LogPowerSolution {
    /// Drops identically zero polynomials; an empty map is the zero function.
    pub fn new(mu: C64, terms: BTreeMap<usize, Vec<C64>>) -> Self {
        let terms = terms
            .into_iter()
            .map(|(k, p)| (k, trim(p)))
            .filter(|(_, p)| !p.is_empty())
            .collect();
        Self { mu, terms }
    }

    pub fn zero(mu: C64) -> Self {
        Self {
            mu,
            terms: BTreeMap::new(),
        }
    }

    /// `z^μ`.
    pub fn monomial(mu: C64) -> Self {
        Self::single(mu, 0, vec![C64::new(1.0, 0.0)])
    }

    /// `c(z) z^μ log^k z`.
    pub fn single(mu: C64, k: usize, poly: Vec<C64>) -> Self {
        Self::new(mu, BTreeMap::from([(k, poly)]))
    }

    pub fn mu(&self) -> C64 {
        self.mu
    }

    pub fn terms(&self) -> &BTreeMap<usize, Vec<C64>> {
        &self.terms
    }

    /// Highest log power `K`, or `None` for the zero function.
    pub fn log_degree(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(
            self.mu,
            self.terms
                .iter()
                .map(|(k, p)| (*k, p.iter().map(|x| x * c).collect()))
                .collect(),
        )
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.mu != other.mu {
            return Err(Error::Domain(format!(
                "cannot add log-power terms with exponents {} and {}",
                self.mu, other.mu
            )));
        }
        let mut terms = self.terms.clone();
        for (k, p) in &other.terms {
            let merged = poly_add(terms.get(k).map(Vec::as_slice).unwrap_or(&[]), p);
            terms.insert(*k, merged);
        }
        Ok(Self::new(self.mu, terms))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `Σ_i w_i f_i` over entries sharing one exponent.
    pub fn linear_combination(mu: C64, weights: &[C64], items: &[Self]) -> Result<Self> {
        weights
            .iter()
            .zip(items)
            .try_fold(Self::zero(mu), |acc, (w, f)| acc.try_add(&f.scale(*w)))
    }

    /// Exact `z · d/dz` by the product and chain rules:
    /// the new `c_k` is `Σ_j (j+μ) c_{k,j} z^j + (k+1) c_{k+1}`.
    pub fn classical_derivative(&self) -> Self {
        let mut out: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
        for (&k, poly) in &self.terms {
            let scaled: Vec<C64> = poly
                .iter()
                .enumerate()
                .map(|(j, c)| c * (self.mu + j as f64))
                .collect();
            let e = out.entry(k).or_default();
            *e = poly_add(e, &scaled);
            if k >= 1 {
                let lowered: Vec<C64> = poly.iter().map(|c| c * k as f64).collect();
                let e = out.entry(k - 1).or_default();
                *e = poly_add(e, &lowered);
            }
        }
        Self::new(self.mu, out)
    }

    /// Largest coefficient modulus, 0 for the zero function.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Principal branch; `log` needs `z ∉ (−∞, 0]`.
    pub fn evaluate(&self, z: C64) -> Result<C64> {
        if z.im == 0.0 && z.re <= 0.0 {
            return Err(Error::BranchCut(z));
        }
        let base = principal_power(z, self.mu)?;
        let log = z.ln();
        let mut acc = C64::new(0.0, 0.0);
        for (&k, poly) in &self.terms {
            let pz = poly.iter().rev().fold(C64::new(0.0, 0.0), |a, c| a * z + c);
            acc += pz * log.powi(k as i32);
        }
        crate::finite_or_overflow(acc * base, "log-power evaluation")
    }
}

/// Free-function form of [`LogPowerSolution::classical_derivative`].
pub fn classical_derivative_logpower(f: &LogPowerSolution) -> LogPowerSolution {
    f.classical_derivative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn derivative_examples() {
        let mu = c(1.7, 0.3);
        let f = LogPowerSolution::monomial(mu);
        assert_eq!(f.classical_derivative(), f.scale(mu));

        let h2 = LogPowerSolution::single(mu, 1, vec![c(1.0, 0.0)]);
        let expected = h2.scale(mu).try_add(&LogPowerSolution::monomial(mu)).unwrap();
        assert_eq!(h2.classical_derivative(), expected);

        let h3 = LogPowerSolution::single(mu, 2, vec![c(0.5, 0.0)]);
        let lhs = h3.classical_derivative().try_sub(&h3.scale(mu)).unwrap();
        assert_eq!(lhs, h2);
    }

    #[test]
    fn polynomial_coefficients_shift_exponent() {
        // z (z^μ (1 + 2z))' = μ z^μ + 2(μ+1) z^{μ+1}
        let mu = c(0.5, 0.0);
        let f = LogPowerSolution::single(mu, 0, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let d = f.classical_derivative();
        assert_eq!(d.terms()[&0], vec![c(0.5, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn evaluation() {
        let e = std::f64::consts::E;
        let f = LogPowerSolution::single(c(1.0, 0.0), 1, vec![c(1.0, 0.0)]);
        assert!((f.evaluate(c(e, 0.0)).unwrap() - c(e, 0.0)).norm() < 1e-14);
        assert!(matches!(f.evaluate(c(-1.0, 0.0)), Err(Error::BranchCut(_))));
        assert_eq!(LogPowerSolution::zero(c(1.0, 0.0)).evaluate(c(2.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn normalization() {
        let f = LogPowerSolution::new(
            c(1.0, 0.0),
            BTreeMap::from([(0, vec![c(1.0, 0.0), c(0.0, 0.0)]), (3, vec![c(0.0, 0.0)])]),
        );
        assert_eq!(f.log_degree(), Some(0));
        assert_eq!(f.terms()[&0].len(), 1);
        let g = f.try_sub(&f).unwrap();
        assert!(g.is_zero());
        assert!(f.try_add(&LogPowerSolution::monomial(c(2.0, 0.0))).is_err());
    }
}
