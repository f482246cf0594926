//! Roots of `ratio(μ) = b` inside a rectangle of the right half-plane.

use super::MomentSequence;
use crate::{Error, Result, C64};

/// Axis-aligned search rectangle with its scan step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub step: f64,
}

impl Default for Region {
    fn default() -> Self {
        Self {
            re_min: 1.0,
            re_max: 50.0,
            im_min: -25.0,
            im_max: 25.0,
            step: 0.25,
        }
    }
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
            step: Region::default().step,
        }
        .validated()
    }

    pub fn with_step(mut self, step: f64) -> Result<Self> {
        self.step = step;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        let all = [self.re_min, self.re_max, self.im_min, self.im_max, self.step];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("region bounds must be finite".into()));
        }
        if self.re_min < 1.0 {
            return Err(Error::Domain(format!(
                "search region must lie in Re >= 1, got re_min = {}",
                self.re_min
            )));
        }
        if self.re_max < self.re_min || self.im_max < self.im_min || self.step <= 0.0 {
            return Err(Error::Domain("empty region or non-positive step".into()));
        }
        Ok(self)
    }

    pub fn contains(&self, z: C64) -> bool {
        let tol = 1e-9 * (1.0 + z.norm());
        z.re >= self.re_min - tol
            && z.re <= self.re_max + tol
            && z.im >= self.im_min - tol
            && z.im <= self.im_max + tol
    }

    fn nodes(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| lo + i as f64 * step).collect()
    }
}

const ACCEPT: f64 = 1e-10;
const NEWTON_ITERS: usize = 100;

enum Newton {
    Root(C64),
    Escaped,
    Stalled(C64),
}

fn newton(seq: &MomentSequence, b: C64, start: C64, region: &Region) -> Newton {
    let f = |z: C64| seq.ratio(z).map(|r| r - b);
    let accept = ACCEPT * (1.0 + b.norm());
    let max_step = 4.0 * region.step;
    let margin = 2.0 * region.step;
    let mut z = start;
    for _ in 0..NEWTON_ITERS {
        let fz = match f(z) {
            Ok(v) => v,
            Err(_) => return Newton::Stalled(z),
        };
        if fz.norm() <= 1e-3 * accept {
            return Newton::Root(z);
        }
        // derivative along the imaginary direction keeps Re(z) fixed
        let h = 1e-6 * (1.0 + z.norm());
        let ih = C64::new(0.0, h);
        let d = match (f(z + ih), f(z - ih)) {
            (Ok(u), Ok(v)) => (u - v) / (2.0 * ih),
            _ => return Newton::Stalled(z),
        };
        if d.norm() == 0.0 || !crate::is_finite(d) {
            return Newton::Stalled(z);
        }
        let mut dz = fz / d;
        if dz.norm() > max_step {
            dz *= max_step / dz.norm();
        }
        let next = z - dz;
        if next.re < region.re_min - margin
            || next.re > region.re_max + margin
            || next.im < region.im_min - margin
            || next.im > region.im_max + margin
        {
            return Newton::Escaped;
        }
        z = C64::new(next.re.max(1.0), next.im);
        if dz.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    match f(z) {
        Ok(v) if v.norm() <= accept => Newton::Root(z),
        _ => Newton::Stalled(z),
    }
}

fn table_roots(seq: &MomentSequence, last: usize, b: C64, region: &Region) -> Vec<C64> {
    if region.im_min > 0.0 || region.im_max < 0.0 {
        return Vec::new();
    }
    let lo = region.re_min.ceil().max(1.0) as usize;
    let hi = (region.re_max.floor() as usize).min(last);
    (lo..=hi)
        .map(|p| C64::new(p as f64, 0.0))
        .filter(|z| match seq.ratio(*z) {
            Ok(r) => (r - b).norm() <= ACCEPT * (1.0 + b.norm()),
            Err(_) => false,
        })
        .collect()
}

/// Exact inverses of the ratio where one is available.
fn closed_form_roots(seq: &MomentSequence, b: C64, region: &Region) -> Option<Vec<C64>> {
    let candidates = match seq {
        MomentSequence::Factorial => vec![b],
        MomentSequence::Catalan => {
            if (4.0 - b).norm() == 0.0 {
                Vec::new()
            } else {
                vec![(b + 2.0) / (4.0 - b)]
            }
        }
        MomentSequence::QFactorial { q } => {
            let arg = 1.0 + (q - 1.0) * b;
            if arg.norm() == 0.0 {
                Vec::new()
            } else {
                let lq = q.ln();
                let base = arg.ln() / lq;
                let period = 2.0 * std::f64::consts::PI / lq;
                let lo = ((region.im_min - base.im) / period).ceil() as i64 - 1;
                let hi = ((region.im_max - base.im) / period).floor() as i64 + 1;
                (lo..=hi).map(|k| base + C64::new(0.0, k as f64 * period)).collect()
            }
        }
        _ => return None,
    };
    Some(candidates.into_iter().filter(|z| region.contains(*z)).collect())
}

/// All `μ` in `region` with `ratio(μ) = b`. Factorial, Catalan and q-factorial
/// sequences are inverted exactly; other sequences use a grid scan of
/// `|ratio - b|` followed by complex Newton polishing from each local minimum.
///
/// Roots are sorted by `|Im μ|`, then `Re μ`.
pub fn solve_ratio_equation(seq: &MomentSequence, b: C64, region: &Region) -> Result<Vec<C64>> {
    let region = region.validated()?;
    if let Some(last) = seq.max_table_index() {
        return Ok(table_roots(seq, last, b, &region));
    }
    if let Some(mut roots) = closed_form_roots(seq, b, &region) {
        sort_roots(&mut roots);
        return Ok(roots);
    }
    let xs = Region::nodes(region.re_min, region.re_max, region.step);
    let ys = Region::nodes(region.im_min, region.im_max, region.step);
    let (nx, ny) = (xs.len(), ys.len());
    let grid: Vec<f64> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| C64::new(x, y)))
        .map(|z| match seq.ratio(z) {
            Ok(r) => (r - b).norm(),
            Err(_) => f64::INFINITY,
        })
        .collect();

    let mut roots: Vec<C64> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = grid[j * nx + i];
            if !v.is_finite() {
                continue;
            }
            let is_min = (j.saturating_sub(1)..=(j + 1).min(ny - 1)).all(|jj| {
                (i.saturating_sub(1)..=(i + 1).min(nx - 1))
                    .all(|ii| (ii == i && jj == j) || grid[jj * nx + ii] >= v)
            });
            if !is_min {
                continue;
            }
            let start = C64::new(xs[i], ys[j]);
            match newton(seq, b, start, &region) {
                Newton::Root(mu) => {
                    let dup = roots
                        .iter()
                        .any(|r| (r - mu).norm() <= 1e-7 * (1.0 + mu.norm()));
                    if !dup && region.contains(mu) {
                        roots.push(mu);
                    }
                }
                Newton::Escaped => {}
                Newton::Stalled(at) => {
                    // only a failure when the local linear model put a root in this cell
                    let h = 1e-6 * (1.0 + start.norm());
                    let ih = C64::new(0.0, h);
                    let slope = match (seq.ratio(start + ih), seq.ratio(start - ih)) {
                        (Ok(u), Ok(w)) => ((u - w) / (2.0 * ih)).norm(),
                        _ => 0.0,
                    };
                    if slope > 0.0 && v / slope <= 0.5 * region.step {
                        return Err(Error::Convergence(format!(
                            "Newton stalled at {at} from candidate {start} for b = {b}"
                        )));
                    }
                }
            }
        }
    }
    sort_roots(&mut roots);
    Ok(roots)
}

fn sort_roots(roots: &mut [C64]) {
    roots.sort_by(|a, b| {
        (a.im.abs(), a.re, a.im)
            .partial_cmp(&(b.im.abs(), b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}
