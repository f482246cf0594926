//! Dispatch of one validated problem to the core operations.

use std::time::Instant;

use momentsys::matrices::eigen;
use momentsys::moments::{solve_ratio_equation, Region};
use momentsys::series::{GeneralizedSeries, LogPowerSolution};
use momentsys::solver::{
    check_hypotheses, floquet_basis, floquet_coefficients, residual, residual_series,
    verify_jackson, FloquetSolution, HypothesisReport,
};
use momentsys::structure::{
    change_of_variable, planar_diagonal, planar_jordan, zmb_general, SecondSolution,
    SolutionColumn, SymbolicSolutionMatrix,
};
use momentsys::{ComplexMatrix, Complex64 as C64, MomentSequence, ProblemSpec};
use serde_json::json;

use crate::dto::*;
use crate::error::CliError;

/// Command-line overrides applied on top of the problem file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub p_max: Option<usize>,
    pub truncation: Option<usize>,
    pub tol: Option<f64>,
    pub region: Option<Region>,
    pub timing: bool,
}

/// Sample points for the Jackson comparison, off the real axis and inside the unit disc.
fn jackson_points() -> Vec<C64> {
    (0..20)
        .map(|i| C64::from_polar(0.2 + 0.03 * i as f64, 0.4 + 0.1 * i as f64))
        .collect()
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("({}{:+}i)", z.re, z.im)
    }
}

fn plain_series(y: &GeneralizedSeries<Vec<C64>>) -> SeriesDto {
    SeriesDto {
        nu: pair(y.nu()),
        coeffs: y.coeffs().iter().map(|s| pairs(s)).collect(),
        log_terms: Default::default(),
    }
}

fn floquet_dto(label: String, sol: &FloquetSolution, spec: &ProblemSpec) -> SolutionDto {
    SolutionDto::Series {
        label,
        series: plain_series(&sol.series),
        residual: finite(residual(sol, spec)),
        coeff_growth: sol.diagnostics.coeff_growth.iter().copied().map(finite).collect(),
        geometric_rate_estimate: finite(sol.diagnostics.geometric_rate_estimate),
    }
}

fn series_dto(label: String, y: &GeneralizedSeries<Vec<C64>>, spec: &ProblemSpec) -> SolutionDto {
    let growth = y
        .coeffs()
        .iter()
        .map(|s| finite(s.iter().map(|x| x.norm()).sum()))
        .collect();
    SolutionDto::Series {
        label,
        series: plain_series(y),
        residual: residual_series(y, spec).ok().and_then(finite),
        coeff_growth: growth,
        geometric_rate_estimate: None,
    }
}

fn log_power_dto(f: &LogPowerSolution) -> LogPowerDto {
    LogPowerDto {
        mu: pair(f.mu()),
        terms: f
            .terms()
            .iter()
            .map(|(k, poly)| LogTermDto {
                log_power: *k,
                poly: pairs(poly),
            })
            .collect(),
    }
}

fn display_log_power(f: &LogPowerSolution) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.terms()
        .iter()
        .map(|(k, poly)| {
            let p = match poly.as_slice() {
                [c] if *c == C64::new(1.0, 0.0) => String::new(),
                [c] => format!("{} ", fmt_c(*c)),
                _ => {
                    let t: Vec<String> = poly
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.norm() != 0.0)
                        .map(|(j, c)| format!("{} z^{j}", fmt_c(*c)))
                        .collect();
                    format!("({}) ", t.join(" + "))
                }
            };
            let log = match k {
                0 => String::new(),
                1 => " log(z)".into(),
                k => format!(" log(z)^{k}"),
            };
            format!("{p}z^{}{log}", fmt_c(f.mu()))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn column_dto(col: &SolutionColumn) -> (ColumnDto, Vec<String>) {
    match col {
        SolutionColumn::Monomial { s0, mu } => {
            let shown = s0
                .iter()
                .map(|c| match *c {
                    c if c.norm() == 0.0 => "0".to_string(),
                    c if c == C64::new(1.0, 0.0) => format!("z^{}", fmt_c(*mu)),
                    c => format!("{} z^{}", fmt_c(c), fmt_c(*mu)),
                })
                .collect();
            (ColumnDto::Monomial { mu: pair(*mu), s0: pairs(s0) }, shown)
        }
        SolutionColumn::LogPower(entries) => (
            ColumnDto::LogPower {
                entries: entries.iter().map(log_power_dto).collect(),
            },
            entries.iter().map(display_log_power).collect(),
        ),
        SolutionColumn::QTheta { functions, weights } => {
            let shown = weights
                .iter()
                .map(|row| {
                    let t: Vec<String> = row
                        .iter()
                        .enumerate()
                        .filter(|(_, w)| w.norm() != 0.0)
                        .map(|(k, w)| format!("{} H_{}", fmt_c(*w), k + 1))
                        .collect();
                    if t.is_empty() { "0".into() } else { t.join(" + ") }
                })
                .collect();
            (
                ColumnDto::QTheta {
                    q: functions.q,
                    c: pair(functions.c),
                    mu: pair(functions.mu),
                    count: functions.count,
                    weights: weights.iter().map(|r| pairs(r)).collect(),
                },
                shown,
            )
        }
    }
}

fn symbolic_dto(label: String, columns: &[SolutionColumn], residual: f64) -> SolutionDto {
    let (columns, shown): (Vec<_>, Vec<_>) = columns.iter().map(column_dto).unzip();
    // row-major display of the column list
    let n = shown.first().map_or(0, Vec::len);
    let display = (0..n).map(|i| shown.iter().map(|c| c[i].clone()).collect()).collect();
    SolutionDto::Symbolic {
        label,
        columns,
        display,
        residual: finite(residual),
    }
}

fn matrix_dto(label: &str, m: &SymbolicSolutionMatrix) -> SolutionDto {
    symbolic_dto(label.into(), &m.columns, m.defect)
}

fn report_dto(r: &HypothesisReport, seq: &MomentSequence) -> ReportDto {
    let h1 = &r.h1;
    ReportDto {
        h1: H1Dto {
            holds: h1.holds,
            mu: pair(h1.mu),
            ratio_at_mu: pair(h1.ratio_at_mu),
            in_spectrum: h1.in_spectrum,
            eigvec: h1.eigvec.as_deref().map(pairs),
            resonances: h1
                .resonances
                .iter()
                .map(|&p| ResonanceDto {
                    p,
                    ratio: pair(seq.ratio(h1.mu + p as f64).unwrap_or(C64::new(f64::NAN, f64::NAN))),
                })
                .collect(),
            checked_up_to: h1.checked_up_to,
            n_offset: h1.n_offset,
        },
        h2: r.h2.as_ref().map(|h| H2Dto {
            bound_c: h.bound_c.and_then(finite),
            argmax_p: h.argmax_p,
            checked_up_to: h.checked_up_to,
            monotone_tail_flag: h.monotone_tail_flag,
            resonance: h.resonance,
            note: h.note.clone(),
        }),
        norm_criterion: NormCriterionDto {
            holds: r.coro1.holds,
            norm_b: r.coro1.norm_b,
            min_abs_ratio: finite(r.coro1.min_abs_ratio),
            margin: finite(r.coro1.margin),
            sup_ratio_inverse: finite(r.coro1.sup_ratio_inverse),
            checked_up_to: r.coro1.checked_up_to,
        },
    }
}

/// Admissible exponents for every eigenvalue of `B`, sorted.
fn candidate_exponents(spec: &ProblemSpec, region: &Region) -> Result<Vec<C64>, CliError> {
    let spectrum = eigen(&spec.b)?;
    let mut mus = Vec::new();
    for cluster in &spectrum.clusters {
        if let Ok(roots) = solve_ratio_equation(&spec.seq, cluster.value, region) {
            mus.extend(roots);
        }
    }
    mus.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    mus.dedup_by(|a, b| (*a - *b).norm() <= 1e-12 * (1.0 + b.norm()));
    Ok(mus)
}

fn eigenvectors_for(spec: &ProblemSpec, value: C64) -> Result<Vec<Vec<C64>>, CliError> {
    let spectrum = eigen(&spec.b)?;
    Ok(spectrum
        .cluster_near(value, spec.tol.spec)
        .map(|c| c.vectors.clone())
        .unwrap_or_default())
}

fn reports(bundle: &mut ResultBundle, v: &Validated, mus: &[C64]) -> Result<Vec<HypothesisReport>, CliError> {
    let out = mus
        .iter()
        .map(|&mu| check_hypotheses(&v.spec, mu, v.n_offset))
        .collect::<Result<Vec<_>, _>>()?;
    bundle.hypothesis_reports = out.iter().map(|r| report_dto(r, &v.spec.seq)).collect();
    Ok(out)
}

fn exponents(v: &Validated) -> Result<Vec<C64>, CliError> {
    match v.mu {
        Some(mu) => Ok(vec![mu]),
        None => candidate_exponents(&v.spec, &v.region),
    }
}

fn label(mu: C64, k: usize) -> String {
    format!("mu={} #{k}", fmt_c(mu))
}

/// Solutions at each exponent whose (H1) holds; `false` when one fails.
fn solve_at(bundle: &mut ResultBundle, v: &Validated, mus: &[C64]) -> Result<bool, CliError> {
    let mut all_hold = true;
    for r in reports(bundle, v, mus)? {
        if !r.h1.holds {
            all_hold = false;
            continue;
        }
        for (k, s0) in eigenvectors_for(&v.spec, r.h1.ratio_at_mu)?.iter().enumerate() {
            let sol = floquet_coefficients(&v.spec, r.h1.mu, s0)?;
            bundle.push_solution(floquet_dto(label(sol.mu, k), &sol, &v.spec));
        }
    }
    Ok(all_hold)
}

fn solve(bundle: &mut ResultBundle, v: &Validated) -> Result<(), CliError> {
    if v.mu.is_some() {
        let ok = solve_at(bundle, v, &exponents(v)?)?;
        if !ok {
            bundle.status = Status::HypothesisFailure;
        }
        return Ok(());
    }
    basis(bundle, v)
}

fn basis(bundle: &mut ResultBundle, v: &Validated) -> Result<(), CliError> {
    reports(bundle, v, &candidate_exponents(&v.spec, &v.region)?)?;
    for (k, sol) in floquet_basis(&v.spec, &v.region)?.iter().enumerate() {
        bundle.push_solution(floquet_dto(label(sol.mu, k), sol, &v.spec));
    }
    if bundle.solutions.is_empty() {
        bundle.status = Status::HypothesisFailure;
    }
    Ok(())
}

fn check(bundle: &mut ResultBundle, v: &Validated) -> Result<(), CliError> {
    let mus = exponents(v)?;
    let found = reports(bundle, v, &mus)?;
    if found.is_empty() || found.iter().any(|r| !r.h1.holds) {
        bundle.status = Status::HypothesisFailure;
    }
    Ok(())
}

fn zmb(bundle: &mut ResultBundle, v: &Validated) -> Result<(), CliError> {
    let m = zmb_general(&v.spec.b, &v.spec.seq, &v.region, None, v.hint.as_ref())?;
    bundle.push_solution(matrix_dto("z_m^B", &m));
    bundle.diagnostics.insert("jordan_blocks".into(), json!(m.decomposition.block_sizes));
    Ok(())
}

fn first_root(seq: &MomentSequence, value: C64, region: &Region) -> Result<C64, CliError> {
    solve_ratio_equation(seq, value, region)?
        .first()
        .copied()
        .ok_or(CliError::Core(momentsys::Error::NoExponentFound(value)))
}

fn planar(bundle: &mut ResultBundle, v: &Validated) -> Result<(), CliError> {
    let spec = &v.spec;
    let b = &spec.b;
    if b.n() != 2 {
        return Err(CliError::Usage(format!("planar mode needs a 2x2 system, got {0}x{0}", b.n())));
    }
    let zero = C64::new(0.0, 0.0);
    let seq = &spec.seq;
    let mu1 = match v.mu {
        Some(mu) => mu,
        None => first_root(seq, b.get(0, 0), &v.region)?,
    };
    if b.get(0, 1) == zero && b.get(1, 0) == zero {
        let mu2 = first_root(seq, b.get(1, 1), &v.region)?;
        let out = planar_diagonal(&spec.a, seq, mu1, mu2, spec.order)?;
        let bspec = ProblemSpec { b: ComplexMatrix::diag(&[seq.ratio(mu1)?, seq.ratio(mu2)?]), ..spec.clone() };
        bundle.push_solution(floquet_dto("first".into(), &out.first, &bspec));
        bundle.push_solution(floquet_dto("second".into(), &out.second, &bspec));
        bundle.diagnostics.insert("closed_form_deviation".into(), json!(out.closed_form_deviation.and_then(finite)));
        bundle.diagnostics.insert("beta".into(), json!(out.params.beta.map(pair)));
        bundle.diagnostics.insert("lambda".into(), json!(pair(out.params.lambda)));
    } else if b.get(1, 0) == zero && b.get(0, 0) == b.get(1, 1) && b.get(0, 1) == C64::new(1.0, 0.0) {
        let out = planar_jordan(&spec.a, seq, mu1, spec.order, None)?;
        let r = seq.ratio(mu1)?;
        let bspec = ProblemSpec {
            b: ComplexMatrix::from_rows(&[vec![r, C64::new(1.0, 0.0)], vec![zero, r]])?,
            ..spec.clone()
        };
        bundle.push_solution(floquet_dto("first".into(), &out.first, &bspec));
        let second_residual = out.second_residual.unwrap_or(f64::NAN);
        match &out.second {
            Some(SecondSolution::Column(col)) => {
                bundle.push_solution(symbolic_dto("second".into(), std::slice::from_ref(col), second_residual));
            }
            Some(SecondSolution::LogSeries { regular, log_part }) => {
                let mut series = plain_series(regular);
                series.log_terms.insert("1".into(), plain_series(log_part).coeffs);
                bundle.push_solution(SolutionDto::Series {
                    label: "second".into(),
                    series,
                    residual: finite(second_residual),
                    coeff_growth: Vec::new(),
                    geometric_rate_estimate: None,
                });
            }
            None => {}
        }
        bundle.diagnostics.insert("closed_form_deviation".into(), json!(out.closed_form_deviation.and_then(finite)));
        bundle.diagnostics.insert("lambda".into(), json!(pair(out.params.lambda)));
        if let Some(note) = out.note {
            bundle.diagnostics.insert("note".into(), json!(note));
        }
    } else {
        return Err(CliError::Usage(
            "planar mode needs B = diag(b1, b2) or B = [[e, 1], [0, e]]".into(),
        ));
    }
    Ok(())
}

fn verify(bundle: &mut ResultBundle, v: &Validated) -> Result<(), CliError> {
    let MomentSequence::QFactorial { q } = v.spec.seq else {
        return Err(CliError::Usage(format!(
            "verify-jackson needs a qfactorial sequence, got {}",
            v.spec.seq
        )));
    };
    solve(bundle, v)?;
    let points = jackson_points();
    let mut deviations = Vec::new();
    let mut worst: f64 = 0.0;
    for s in &bundle.solutions {
        let SolutionDto::Series { series, .. } = s else { continue };
        let coeffs: Vec<Vec<C64>> = series.coeffs.iter().map(|c| c.iter().copied().map(complex).collect()).collect();
        let series = GeneralizedSeries::new(complex(series.nu), coeffs)?;
        let d = verify_jackson(&series, q, &points)?;
        let scale = 1.0 + series.max_norm();
        worst = worst.max(d / scale);
        deviations.push(finite(d));
    }
    bundle.diagnostics.insert("jackson_deviation".into(), json!(deviations));
    if worst > v.spec.tol.res {
        bundle.status = Status::HypothesisFailure;
    }
    Ok(())
}

fn cov(bundle: &mut ResultBundle, v: &Validated) -> Result<(), CliError> {
    let lambda = v
        .lambda
        .ok_or_else(|| CliError::Usage("change-of-variable needs lambda".into()))?;
    let spec = &v.spec;
    let mu = match v.mu {
        Some(mu) => mu,
        None => {
            let found = reports(bundle, v, &candidate_exponents(spec, &v.region)?)?;
            found
                .iter()
                .find(|r| r.h1.holds)
                .map(|r| r.h1.mu)
                .ok_or_else(|| CliError::Core(momentsys::Error::NoExponentFound(spec.b.trace())))?
        }
    };
    if v.mu.is_some() {
        reports(bundle, v, &[mu])?;
    }
    let t = change_of_variable(&spec.a, &spec.b, &spec.seq, mu, lambda, spec.order)?;
    let reduced = ProblemSpec { a: spec.a.shift(-lambda), ..spec.clone() };
    let s0 = eigenvectors_for(spec, spec.seq.ratio(mu)?)?
        .into_iter()
        .next()
        .ok_or(CliError::Core(momentsys::Error::NoExponentFound(mu)))?;
    let y_tilde = floquet_coefficients(&reduced, mu, &s0)?;
    let y = t.apply(&y_tilde.series)?;
    bundle.push_solution(floquet_dto("reduced".into(), &y_tilde, &reduced));
    bundle.push_solution(series_dto("h*reduced".into(), &y, spec));
    bundle.transform = Some(TransformDto {
        lambda: pair(lambda),
        mu: pair(mu),
        h: t.h.coeffs().iter().map(rows).collect(),
    });
    Ok(())
}

fn dispatch(bundle: &mut ResultBundle, mode: Mode, v: &Validated) -> Result<(), CliError> {
    match mode {
        Mode::Solve => solve(bundle, v),
        Mode::Basis => basis(bundle, v),
        Mode::Check => check(bundle, v),
        Mode::Zmb => zmb(bundle, v),
        Mode::Planar => planar(bundle, v),
        Mode::VerifyJackson => verify(bundle, v),
        Mode::ChangeOfVariable => cov(bundle, v),
    }
}

fn apply_overrides(mut v: Validated, opts: &RunOptions) -> Validated {
    if let Some(p) = opts.p_max {
        v.spec = v.spec.with_p_max(p);
    }
    if let Some(n) = opts.truncation {
        v.spec.order = n.max(1);
    }
    if let Some(t) = opts.tol {
        v.spec.tol.res = t;
    }
    if let Some(r) = opts.region {
        v.region = r;
    }
    v
}

/// Records `e` on the bundle; resonance and missing exponents count as
/// hypothesis failures, everything else as an error.
pub fn record_error(bundle: &mut ResultBundle, e: &CliError) {
    bundle.status = match e {
        CliError::Core(momentsys::Error::Resonant { .. } | momentsys::Error::NoExponentFound(_)) => {
            Status::HypothesisFailure
        }
        _ => Status::Error,
    };
    bundle.error = Some(ErrorDto {
        kind: e.kind().into(),
        message: e.to_string(),
    });
}

/// Runs `mode` on `problem`; failures are recorded in the bundle rather than returned.
pub fn execute(problem: &Problem, mode: Mode, opts: &RunOptions) -> ResultBundle {
    let start = Instant::now();
    let mut bundle = ResultBundle::new(mode, problem.sequence.clone());
    let outcome = problem
        .validate()
        .map(|v| apply_overrides(v, opts))
        .and_then(|v| {
            dispatch(&mut bundle, mode, &v)?;
            Ok(v.spec.tol.res)
        });
    match outcome {
        Ok(tol) => {
            let bad: Vec<usize> = bundle
                .residuals
                .iter()
                .enumerate()
                .filter(|(_, r)| !matches!(r, Some(x) if *x <= tol))
                .map(|(i, _)| i)
                .collect();
            if !bad.is_empty() {
                bundle.status = Status::Error;
                bundle.error = Some(ErrorDto {
                    kind: "ResidualTolerance".into(),
                    message: format!("solutions {bad:?} exceed the residual tolerance {tol:e}"),
                });
            }
        }
        Err(e) => record_error(&mut bundle, &e),
    }
    if opts.timing {
        bundle.timing = Some(TimingDto {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    bundle
}

pub fn exit_code(bundle: &ResultBundle) -> i32 {
    match bundle.status {
        Status::Ok => 0,
        Status::HypothesisFailure => 2,
        Status::Error => 1,
    }
}
