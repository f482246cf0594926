//! Finite checks of the spectral hypotheses on `B` along `ratio(p+μ)`.

use super::ProblemSpec;
use crate::matrices::{eigen, ComplexMatrix, SpectralData, EPS_SPEC};
use crate::moments::MomentSequence;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct H1Verdict {
    pub holds: bool,
    /// Exponent actually tested, `μ + N_offset`.
    pub mu: C64,
    pub ratio_at_mu: C64,
    pub in_spectrum: bool,
    /// Eigenvector for `ratio(μ)` when it is an eigenvalue.
    pub eigvec: Option<Vec<C64>>,
    /// Indices `p ≥ 1` with `ratio(p+μ) ∈ spec(B)`.
    pub resonances: Vec<usize>,
    pub checked_up_to: usize,
    pub n_offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct H2Report {
    /// `max_{p ≤ P} ‖(ratio(p+μ)I − B)⁻¹‖₁`, absent on resonance.
    pub bound_c: Option<f64>,
    pub argmax_p: Option<usize>,
    pub checked_up_to: usize,
    /// Last 100 norms non-increasing.
    pub monotone_tail_flag: bool,
    pub resonance: Option<usize>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coro1Report {
    pub holds: bool,
    pub norm_b: f64,
    pub min_abs_ratio: f64,
    /// `min |ratio(p+μ)| − ‖B‖₁`.
    pub margin: f64,
    /// `max |m(p+μ−1)/m(p+μ)|`.
    pub sup_ratio_inverse: f64,
    pub checked_up_to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub h1: H1Verdict,
    pub h2: Option<H2Report>,
    pub coro1: Coro1Report,
    pub shifted: Option<usize>,
}

fn require_re_ge_one(mu: C64) -> Result<()> {
    if mu.re < 1.0 {
        Err(Error::Domain(format!(
            "Re(μ) must be at least 1, got {mu}; use the shifted check"
        )))
    } else {
        Ok(())
    }
}

/// Walks `ratio(p+μ)` for `p = 1..=p_max`; overflowing ratios lie beyond any
/// finite spectrum and are reported as `None`.
fn ratio_walk(
    seq: &MomentSequence,
    mu: C64,
    p_max: usize,
) -> impl Iterator<Item = (usize, Result<Option<C64>>)> + '_ {
    (1..=p_max).map(move |p| {
        let r = match seq.ratio(mu + p as f64) {
            Ok(r) => Ok(Some(r)),
            Err(Error::Overflow(_)) => Ok(None),
            Err(e) => Err(e),
        };
        (p, r)
    })
}

/// (H1) with an explicit tolerance and precomputed spectrum.
pub fn check_h1_with(
    spectrum: &SpectralData,
    seq: &MomentSequence,
    mu: C64,
    p_max: usize,
    eps: f64,
) -> Result<H1Verdict> {
    require_re_ge_one(mu)?;
    let ratio_at_mu = seq.ratio(mu)?;
    let cluster = spectrum.cluster_near(ratio_at_mu, eps);
    let mut resonances = Vec::new();
    let mut checked = 0;
    for (p, r) in ratio_walk(seq, mu, p_max) {
        match r {
            Ok(Some(r)) if spectrum.contains(r, eps) => resonances.push(p),
            Ok(_) => {}
            Err(Error::Domain(_)) if seq.max_table_index().is_some() => break,
            Err(e) => return Err(e),
        }
        checked = p;
    }
    Ok(H1Verdict {
        holds: cluster.is_some() && resonances.is_empty(),
        mu,
        ratio_at_mu,
        in_spectrum: cluster.is_some(),
        eigvec: cluster.map(|c| c.vectors[0].clone()),
        resonances,
        checked_up_to: checked,
        n_offset: 0,
    })
}

/// (H1): `ratio(μ) ∈ spec(B)` and `ratio(p+μ) ∉ spec(B)` for `p = 1..=p_max`.
pub fn check_h1(b: &ComplexMatrix, seq: &MomentSequence, mu: C64, p_max: usize) -> Result<H1Verdict> {
    check_h1_with(&eigen(b)?, seq, mu, p_max, EPS_SPEC)
}

/// (H1)′: the same test at `μ + N_offset`, which must have real part ≥ 1.
pub fn check_h1_shifted(
    b: &ComplexMatrix,
    seq: &MomentSequence,
    mu: C64,
    n_offset: usize,
    p_max: usize,
) -> Result<H1Verdict> {
    let shifted = mu + n_offset as f64;
    if shifted.re < 1.0 {
        return Err(Error::Domain(format!(
            "Re(μ) + N = {} is below 1",
            shifted.re
        )));
    }
    let mut v = check_h1(b, seq, shifted, p_max)?;
    v.n_offset = n_offset;
    Ok(v)
}

/// (H2) scan of `‖(ratio(p+μ)I − B)⁻¹‖₁`; a resonance is reported in the
/// result rather than raised.
pub fn check_h2(b: &ComplexMatrix, seq: &MomentSequence, mu: C64, p_max: usize) -> Result<H2Report> {
    require_re_ge_one(mu)?;
    let spectrum = eigen(b)?;
    let mut norms: Vec<f64> = Vec::with_capacity(p_max);
    let mut resonance = None;
    let mut last_ratio = None;
    for (p, r) in ratio_walk(seq, mu, p_max) {
        let norm = match r {
            Ok(Some(r)) => {
                last_ratio = Some(r);
                if spectrum.contains(r, EPS_SPEC) {
                    resonance = Some(p);
                    break;
                }
                match b.scale(C64::new(-1.0, 0.0)).shift(r).inverse() {
                    Ok(inv) => inv.one_norm(),
                    Err(Error::SingularMatrix { .. }) => {
                        resonance = Some(p);
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(None) => 0.0,
            Err(Error::Domain(_)) if seq.max_table_index().is_some() => break,
            Err(e) => return Err(e),
        };
        norms.push(norm);
    }
    let checked_up_to = norms.len();
    let tail = &norms[norms.len().saturating_sub(100)..];
    let monotone_tail_flag = resonance.is_none()
        && tail
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
    let (bound_c, argmax_p) = if resonance.is_some() || norms.is_empty() {
        (None, None)
    } else {
        let (i, v) = norms
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        (Some(v), Some(i + 1))
    };
    let note = bounded_ratio_note(seq, mu, checked_up_to, last_ratio, b.one_norm());
    Ok(H2Report {
        bound_c,
        argmax_p,
        checked_up_to,
        monotone_tail_flag,
        resonance,
        note,
    })
}

/// Sequences whose ratio settles to a finite limit need `‖B‖ ≤ lim |ratio|`
/// for the norm-based criterion.
fn bounded_ratio_note(
    seq: &MomentSequence,
    mu: C64,
    checked: usize,
    last: Option<C64>,
    norm_b: f64,
) -> Option<String> {
    if checked < 4 {
        return None;
    }
    let last = last?;
    let mid = seq.ratio(mu + (checked / 2) as f64).ok()?;
    let settled = (last.norm() - mid.norm()).abs() <= 0.01 * last.norm().max(1e-300);
    let slow = last.norm() <= 2.0 * mid.norm() && last.norm() < 1e6;
    if settled && slow {
        let verdict = if norm_b <= last.norm() { "satisfied" } else { "violated" };
        Some(format!(
            "ratio appears to settle near |r| = {:.6}; the necessary condition ‖B‖₁ ≤ lim |r| is {verdict} (‖B‖₁ = {:.6})",
            last.norm(),
            norm_b
        ))
    } else {
        None
    }
}

/// Norm criterion: `‖B‖₁ < |ratio(p+μ)|` for all scanned `p`, together with
/// the size of `|m(p+μ−1)/m(p+μ)|`.
pub fn check_coro1(b: &ComplexMatrix, seq: &MomentSequence, mu: C64, p_max: usize) -> Result<Coro1Report> {
    let norm_b = b.one_norm();
    let mut min_abs = f64::INFINITY;
    let mut sup_inv: f64 = 0.0;
    let mut checked = 0;
    for (p, r) in ratio_walk(seq, mu, p_max) {
        match r {
            Ok(Some(r)) => {
                min_abs = min_abs.min(r.norm());
                sup_inv = sup_inv.max(1.0 / r.norm());
            }
            Ok(None) => {}
            Err(Error::Domain(_)) if seq.max_table_index().is_some() => break,
            Err(e) => return Err(e),
        }
        checked = p;
    }
    Ok(Coro1Report {
        holds: checked > 0 && norm_b < min_abs && sup_inv.is_finite(),
        norm_b,
        min_abs_ratio: min_abs,
        margin: min_abs - norm_b,
        sup_ratio_inverse: sup_inv,
        checked_up_to: checked,
    })
}

/// All checks for the problem's `B` at `μ + n_offset`; (H2) only runs when
/// (H1) holds.
pub fn check_hypotheses(spec: &ProblemSpec, mu: C64, n_offset: usize) -> Result<HypothesisReport> {
    let spectrum = eigen(&spec.b)?;
    let shifted = mu + n_offset as f64;
    if shifted.re < 1.0 {
        return Err(Error::Domain(format!("Re(μ) + N = {} is below 1", shifted.re)));
    }
    let mut h1 = check_h1_with(&spectrum, &spec.seq, shifted, spec.p_max, spec.tol.spec)?;
    h1.n_offset = n_offset;
    let h2 = if h1.holds {
        Some(check_h2(&spec.b, &spec.seq, shifted, spec.p_max)?)
    } else {
        None
    };
    let coro1 = check_coro1(&spec.b, &spec.seq, shifted, spec.p_max)?;
    Ok(HypothesisReport {
        h1,
        h2,
        coro1,
        shifted: (n_offset > 0).then_some(n_offset),
    })
}
