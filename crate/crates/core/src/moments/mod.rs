//! Moment sequences `m(z)` and their ratio `r(z) = m(z)/m(z-1)`.

mod expr;
mod regularity;
mod roots;

use std::fmt;
use std::str::FromStr;

pub use expr::Expression;
pub use regularity::{check_strongly_regular, RegularityReport};
pub use roots::{solve_ratio_equation, Region};

use crate::special::{ln_gamma, ln_q_gamma};
use crate::{finite_or_overflow, Error, Result, C64};

/// A moment function defined on `Re(z) ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentSequence {
    /// `Γ(1+z)`, the classical derivative.
    Factorial,
    /// `Γ(1+z/α)`.
    GammaRatio { alpha: f64 },
    /// `Γ(1+αz)`.
    Gevrey { alpha: f64 },
    /// `Γ_q(1+z)`, realized by the Jackson q-derivative.
    QFactorial { q: f64 },
    /// `Γ(2z+1) / (Γ(z+2) Γ(z+1))`.
    Catalan,
    /// Values on `0..len`; ratios exist only at integers.
    Table(Vec<f64>),
    /// User expression in `z`.
    Expr(Expression),
}

impl MomentSequence {
    pub fn gamma_ratio(alpha: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        Ok(Self::GammaRatio { alpha })
    }

    pub fn gevrey(alpha: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        Ok(Self::Gevrey { alpha })
    }

    pub fn q_factorial(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::Domain(format!("q must exceed 1, got {q}")));
        }
        Ok(Self::QFactorial { q })
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain("a table needs at least two values".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("table values must be positive, got {v}")));
        }
        Ok(Self::Table(values))
    }

    pub fn expr(source: &str) -> Result<Self> {
        Ok(Self::Expr(Expression::parse(source)?))
    }

    /// Base of the q-difference realization, if any.
    pub fn q(&self) -> Option<f64> {
        match self {
            Self::QFactorial { q } => Some(*q),
            _ => None,
        }
    }

    /// `ln m(z)`, with the same domain as [`eval_m`](Self::eval_m).
    pub fn ln_m(&self, z: C64) -> Result<C64> {
        if z.re < 0.0 {
            return Err(Error::Domain(format!("m(z) needs Re(z) >= 0, got {z}")));
        }
        let one = C64::new(1.0, 0.0);
        match self {
            Self::Factorial => ln_gamma(one + z),
            Self::GammaRatio { alpha } => ln_gamma(one + z / *alpha),
            Self::Gevrey { alpha } => ln_gamma(one + z * *alpha),
            Self::QFactorial { q } => ln_q_gamma(*q, one + z),
            Self::Catalan => Ok(ln_gamma(2.0 * z + 1.0)? - ln_gamma(z + 2.0)? - ln_gamma(z + 1.0)?),
            Self::Table(t) => Ok(C64::new(t[table_index(t, z, 0)?].ln(), 0.0)),
            Self::Expr(e) => {
                let v = e.eval(z)?;
                if v.norm() == 0.0 {
                    return Err(Error::Domain(format!("m({z}) = 0")));
                }
                Ok(v.ln())
            }
        }
    }

    /// `m(z)` for `Re(z) ≥ 0`.
    pub fn eval_m(&self, z: C64) -> Result<C64> {
        match self {
            Self::Table(t) => Ok(C64::new(t[table_index(t, z, 0)?], 0.0)),
            Self::Expr(e) => {
                if z.re < 0.0 {
                    return Err(Error::Domain(format!("m(z) needs Re(z) >= 0, got {z}")));
                }
                e.eval(z)
            }
            _ => finite_or_overflow(self.ln_m(z)?.exp(), "eval_m"),
        }
    }

    /// `m(z) / m(z-1)` for `Re(z) ≥ 1`.
    pub fn ratio(&self, z: C64) -> Result<C64> {
        if z.re < 1.0 || !crate::is_finite(z) {
            return Err(Error::Domain(format!("ratio needs Re(z) >= 1, got {z}")));
        }
        let one = C64::new(1.0, 0.0);
        let v = match self {
            Self::Factorial => z,
            Self::Catalan => (4.0 * z - 2.0) / (z + 1.0),
            Self::QFactorial { q } => ((z * q.ln()).exp() - 1.0) / (q - 1.0),
            Self::GammaRatio { alpha } => {
                (ln_gamma(one + z / *alpha)? - ln_gamma(one + (z - 1.0) / *alpha)?).exp()
            }
            Self::Gevrey { alpha } => {
                (ln_gamma(one + z * *alpha)? - ln_gamma(one + (z - 1.0) * *alpha)?).exp()
            }
            Self::Table(t) => {
                let p = table_index(t, z, 1)?;
                C64::new(t[p] / t[p - 1], 0.0)
            }
            Self::Expr(e) => {
                let den = e.eval(z - 1.0)?;
                if den.norm() == 0.0 {
                    return Err(Error::DivisionByZero(format!("m({}) = 0", z - 1.0)));
                }
                e.eval(z)? / den
            }
        };
        finite_or_overflow(v, "ratio")
    }

    /// Last valid index of a table-backed sequence.
    pub(crate) fn max_table_index(&self) -> Option<usize> {
        match self {
            Self::Table(t) => Some(t.len() - 1),
            _ => None,
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

fn table_index(t: &[f64], z: C64, min: usize) -> Result<usize> {
    let p = z.re.round();
    if z.im != 0.0 || (z.re - p).abs() > 1e-12 || p < min as f64 {
        return Err(Error::Domain(format!(
            "table sequences are defined only at integers >= {min}, got {z}"
        )));
    }
    let p = p as usize;
    if p >= t.len() {
        return Err(Error::Domain(format!(
            "index {p} beyond table of length {}",
            t.len()
        )));
    }
    Ok(p)
}

impl fmt::Display for MomentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Factorial => write!(f, "factorial"),
            Self::GammaRatio { alpha } => write!(f, "gammaratio:alpha={alpha}"),
            Self::Gevrey { alpha } => write!(f, "gevrey:alpha={alpha}"),
            Self::QFactorial { q } => write!(f, "qfactorial:q={q}"),
            Self::Catalan => write!(f, "catalan"),
            Self::Table(t) => {
                let items: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                write!(f, "table:[{}]", items.join(","))
            }
            Self::Expr(e) => write!(f, "expr:{e}"),
        }
    }
}

fn parse_param(rest: &str, key: &str) -> Result<f64> {
    let (k, v) = rest
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected {key}=<value>, got '{rest}'")))?;
    if k.trim() != key {
        return Err(Error::Parse(format!("expected parameter '{key}', got '{}'", k.trim())));
    }
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad number '{}'", v.trim())))
}

impl FromStr for MomentSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim().to_ascii_lowercase(), Some(r)),
            None => (s.to_ascii_lowercase(), None),
        };
        match (head.as_str(), rest) {
            ("factorial", None) => Ok(Self::Factorial),
            ("catalan", None) => Ok(Self::Catalan),
            ("qfactorial", Some(r)) => Self::q_factorial(parse_param(r, "q")?),
            ("gammaratio", Some(r)) => Self::gamma_ratio(parse_param(r, "alpha")?),
            ("gevrey", Some(r)) => Self::gevrey(parse_param(r, "alpha")?),
            ("table", Some(r)) => {
                let inner = r
                    .trim()
                    .strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("table must be [v0,v1,...], got '{r}'")))?;
                let values = inner
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad table value '{}'", v.trim())))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::table(values)
            }
            ("expr", Some(r)) => Self::expr(r),
            _ => Err(Error::Parse(format!("unknown sequence descriptor '{s}'"))),
        }
    }
}
