//! Complex special functions: log-Gamma, q-Gamma, q-brackets and the
//! Jacobi theta series used by the q-difference constructions.

use std::f64::consts::PI;

use crate::{finite_or_overflow, Error, Result, C64};

/// Default relative size below which infinite products and series are cut.
pub const DEFAULT_TAIL: f64 = 1e-16;

/// Truncation controls for the infinite products and series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialConfig {
    pub tail: f64,
    pub max_terms: usize,
}

impl Default for SpecialConfig {
    fn default() -> Self {
        Self {
            tail: DEFAULT_TAIL,
            max_terms: 100_000,
        }
    }
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Principal log of `sin(w)` that stays finite for large `|Im w|`.
fn ln_sin(w: C64) -> C64 {
    let i = C64::i();
    let two_i = C64::new(0.0, 2.0);
    if w.im >= 0.0 {
        // sin w = e^{-iw} (e^{2iw} - 1) / (2i)
        -i * w + ((two_i * w).exp() - 1.0).ln() - two_i.ln()
    } else {
        // sin w = e^{iw} (1 - e^{-2iw}) / (2i)
        i * w + (1.0 - (-two_i * w).exp()).ln() - two_i.ln()
    }
}

fn lanczos_ln_gamma(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (k, &coef) in LANCZOS.iter().enumerate().skip(1) {
        x += coef / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Log-Gamma on the principal branch (up to an additive multiple of `2πi`
/// in the reflected half-plane, which `exp` does not see).
pub fn ln_gamma(z: C64) -> Result<C64> {
    if !crate::is_finite(z) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(z));
    }
    if z.re >= 0.5 {
        Ok(lanczos_ln_gamma(z))
    } else {
        let s = ln_sin(PI * z);
        if !crate::is_finite(s) {
            return Err(Error::Pole(z));
        }
        Ok(C64::new(PI.ln(), 0.0) - s - lanczos_ln_gamma(1.0 - z))
    }
}

/// `Γ(z)`; overflow is reported rather than returned as infinity.
pub fn gamma(z: C64) -> Result<C64> {
    finite_or_overflow(ln_gamma(z)?.exp(), "gamma")
}

fn ln_one_minus(x: C64) -> C64 {
    if x.norm() < 1e-4 {
        // -x - x²/2 - x³/3 - x⁴/4, enough for |x| < 1e-4
        let x2 = x * x;
        -x - x2 / 2.0 - x2 * x / 3.0 - x2 * x2 / 4.0
    } else {
        (1.0 - x).ln()
    }
}

/// `Σ_{p≥0} ln(1 - α q^{-p})`, the log of `(α; q⁻¹)_∞`.
fn ln_q_pochhammer_inv(alpha: C64, q: f64, cfg: &SpecialConfig, at: C64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    let mut x = alpha;
    for _ in 0..cfg.max_terms {
        if x.norm() < cfg.tail {
            return Ok(acc);
        }
        let factor = 1.0 - x;
        if factor.norm() < 1e-14 {
            return Err(Error::Pole(at));
        }
        acc += ln_one_minus(x);
        x /= q;
    }
    Err(Error::Convergence(format!(
        "q-Pochhammer product did not reach tail {:e}",
        cfg.tail
    )))
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("q must exceed 1, got {q}")))
    }
}

/// Log of the q-Gamma function.
pub fn ln_q_gamma_with(q: f64, z: C64, cfg: &SpecialConfig) -> Result<C64> {
    check_q(q)?;
    let lq = q.ln();
    let num = ln_q_pochhammer_inv(C64::new(1.0 / q, 0.0), q, cfg, z)?;
    let den = ln_q_pochhammer_inv((-z * lq).exp(), q, cfg, z)?;
    Ok(num - den + (1.0 - z) * (q - 1.0).ln() + z * (z - 1.0) * 0.5 * lq)
}

pub fn ln_q_gamma(q: f64, z: C64) -> Result<C64> {
    ln_q_gamma_with(q, z, &SpecialConfig::default())
}

/// `Γ_q(z)` with `Γ_q(p+1) = [p]_q!`.
pub fn q_gamma(q: f64, z: C64) -> Result<C64> {
    finite_or_overflow(ln_q_gamma(q, z)?.exp(), "q_gamma")
}

/// `(q^{z-1} - 1) / (q - 1)`, which equals `Γ_q(z) / Γ_q(z-1)`.
pub fn q_bracket(q: f64, z: C64) -> Result<C64> {
    check_q(q)?;
    let v = (((z - 1.0) * q.ln()).exp() - 1.0) / (q - 1.0);
    finite_or_overflow(v, "q_bracket")
}

/// Theta series split as `exp(scale) * mantissa` so quotients never overflow.
#[derive(Debug, Clone, Copy)]
pub struct ScaledTheta {
    pub log_scale: f64,
    pub mantissa: C64,
    /// `Σ n tₙ` under the same scale, for the logarithmic derivative.
    pub weighted: C64,
}

impl ScaledTheta {
    pub fn value(&self) -> Result<C64> {
        finite_or_overflow(self.mantissa * self.log_scale.exp(), "theta_q")
    }

    /// `w Θ'(w) / Θ(w)`.
    pub fn log_derivative(&self) -> C64 {
        self.weighted / self.mantissa
    }
}

/// Bilateral theta series `Σ_{n∈Z} q^{-n(n-1)/2} wⁿ`, summed outward from its
/// dominant term.
pub fn theta_q_scaled(q: f64, w: C64, cfg: &SpecialConfig) -> Result<ScaledTheta> {
    check_q(q)?;
    if w.norm() == 0.0 || !crate::is_finite(w) {
        return Err(Error::Domain(format!("theta_q undefined at {w}")));
    }
    let lq = q.ln();
    let lw = w.ln();
    let log_term = |n: f64| -0.5 * n * (n - 1.0) * lq + n * lw;
    let peak = (0.5 + lw.re / lq).round();
    let log_scale = log_term(peak).re;
    let cut = cfg.tail.ln();

    let mut mantissa = C64::new(0.0, 0.0);
    let mut weighted = C64::new(0.0, 0.0);
    let mut add = |n: f64| -> bool {
        let l = log_term(n) - log_scale;
        if l.re < cut {
            return false;
        }
        let t = l.exp();
        mantissa += t;
        weighted += n * t;
        true
    };
    add(peak);
    let mut k = 1.0;
    loop {
        let up = add(peak + k);
        let down = add(peak - k);
        if !up && !down {
            break;
        }
        k += 1.0;
        if k as usize > cfg.max_terms {
            return Err(Error::Convergence("theta series".into()));
        }
    }
    Ok(ScaledTheta {
        log_scale,
        mantissa,
        weighted,
    })
}

/// `Θ_q(z)`, satisfying `Θ_q(qz) = qz Θ_q(z)`.
pub fn theta_q(q: f64, z: C64) -> Result<C64> {
    theta_q_scaled(q, z, &SpecialConfig::default())?.value()
}
