//! H-functions for `QFactorial(q)` built from Jacobi theta quotients.
//!
//! With `c = q^μ`, `M(z) = Θ(−z)/Θ(−z/c)` satisfies `M(qz) = c M(z)`, and
//! `ℓ(z) = wΘ'(w)/Θ(w)` at `w = −z` satisfies `ℓ(qz) = ℓ(z) + 1`. Writing
//! `H_{p+1} = M u_p`, the additive equations `u_p(qz) = u_p(z) + κ u_{p−1}(z)`
//! with `κ = (q−1)/c` are solved by `u_p = κᵖ φ C(ℓ, p)`, `φ = z^μ / M`.

use crate::series::principal_power;
use crate::special::{theta_q_scaled, SpecialConfig};
use crate::{Error, Result, C64};

/// Step budget of [`telescope_additive`].
pub const TELESCOPE_MAX_STEPS: usize = 10_000;

/// Relative distance to a theta zero treated as a pole hit.
const POLE_GUARD: f64 = 1e-10;

/// Evaluators for `H₁ = z^μ, H₂, …, H_{K+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QHFunctions {
    pub q: f64,
    pub mu: C64,
    /// `q^μ = 1 + (q−1)[μ]_q`.
    pub c: C64,
    /// Number of functions beyond `H₁`.
    pub count: usize,
}

pub fn q_h_functions(q: f64, mu: C64, count: usize) -> Result<QHFunctions> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::Domain(format!("q must exceed 1, got {q}")));
    }
    if mu.re < 1.0 {
        return Err(Error::Domain(format!("Re(μ) must be at least 1, got {mu}")));
    }
    Ok(QHFunctions {
        q,
        mu,
        c: (mu * q.ln()).exp(),
        count,
    })
}

fn binomial(x: C64, p: usize) -> C64 {
    (0..p).fold(C64::new(1.0, 0.0), |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

impl QHFunctions {
    /// `[μ]_q`, the eigenvalue the functions are attached to.
    pub fn eigenvalue(&self) -> C64 {
        (self.c - 1.0) / (self.q - 1.0)
    }

    pub fn kappa(&self) -> C64 {
        (self.q - 1.0) / self.c
    }

    fn guard(&self, z: C64, centre: C64) -> Result<()> {
        let t = (z / centre).ln() / self.q.ln();
        let k = t.re.round();
        let nearest = centre * self.q.powf(k);
        if (z - nearest).norm() <= POLE_GUARD * nearest.norm() {
            return Err(Error::PoleProximity(z));
        }
        Ok(())
    }

    fn theta(&self, w: C64) -> Result<crate::special::ScaledTheta> {
        theta_q_scaled(self.q, w, &SpecialConfig::default())
    }

    /// `M(z) = Θ(−z)/Θ(−z/c)`.
    pub fn m_factor(&self, z: C64) -> Result<C64> {
        self.guard(z, C64::new(1.0, 0.0))?;
        self.guard(z, self.c)?;
        let top = self.theta(-z)?;
        let bottom = self.theta(-z / self.c)?;
        let v = top.mantissa / bottom.mantissa * (top.log_scale - bottom.log_scale).exp();
        crate::finite_or_overflow(v, "theta quotient")
    }

    /// q-logarithm `ℓ(z)`, with `ℓ(qz) = ℓ(z) + 1`.
    pub fn q_log(&self, z: C64) -> Result<C64> {
        self.guard(z, C64::new(1.0, 0.0))?;
        Ok(self.theta(-z)?.log_derivative())
    }

    /// `u_p(z)`, so that `H_{p+1} = M u_p`.
    pub fn u(&self, p: usize, z: C64) -> Result<C64> {
        let phi = principal_power(z, self.mu)? / self.m_factor(z)?;
        Ok(self.kappa().powu(p as u32) * phi * binomial(self.q_log(z)?, p))
    }

    /// `H_k(z)` for `1 ≤ k ≤ count + 1`.
    pub fn h(&self, k: usize, z: C64) -> Result<C64> {
        if k == 0 || k > self.count + 1 {
            return Err(Error::Domain(format!(
                "H_{k} is outside 1..={}",
                self.count + 1
            )));
        }
        let base = principal_power(z, self.mu)?;
        if k == 1 {
            return Ok(base);
        }
        let p = k - 1;
        let v = self.kappa().powu(p as u32) * base * binomial(self.q_log(z)?, p);
        crate::finite_or_overflow(v, "q H-function")
    }

    /// `H_k(qz) − c H_k(z) − (q−1) H_{k−1}(z)`, zero for `k ≥ 2`.
    pub fn functional_defect(&self, k: usize, z: C64) -> Result<C64> {
        let prev = if k >= 2 { self.h(k - 1, z)? } else { C64::new(0.0, 0.0) };
        Ok(self.h(k, z * self.q)? - self.c * self.h(k, z)? - (self.q - 1.0) * prev)
    }
}

/// `u(z) = −Σ_{k≥0} g(qᵏz)`, a solution of `u(qz) − u(z) = g(z)` when the
/// terms decay; stops once a term falls below `tol` relative to the sum.
pub fn telescope_additive(
    g: impl Fn(C64) -> Result<C64>,
    q: f64,
    z: C64,
    tol: f64,
) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    let mut point = z;
    for _ in 0..TELESCOPE_MAX_STEPS {
        let term = g(point)?;
        acc -= term;
        if term.norm() <= tol * acc.norm().max(1.0) {
            return Ok(acc);
        }
        point *= q;
        if !crate::is_finite(point) {
            break;
        }
    }
    Err(Error::TelescopeDivergence(TELESCOPE_MAX_STEPS))
}
