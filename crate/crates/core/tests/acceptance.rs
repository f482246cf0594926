//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::process::ExitCode;

use common::{builtin_sequences, c, commuting_case, random_problem, rank_one_planar, rng};
use momentsys::moments::Region;
use momentsys::series::GeneralizedSeries;
use momentsys::solver::{
    check_h1, check_h1_shifted, check_h2, floquet_basis, floquet_coefficients, residual,
    verify_jackson,
};
use momentsys::special::{q_gamma, theta_q};
use momentsys::structure::{
    change_of_variable, planar_diagonal, planar_jordan, q_h_functions, zmb_diagonalizable,
    zmb_general, SolutionColumn,
};
use momentsys::{ComplexMatrix, Complex64 as C64, Error, LogPowerSolution, MomentSequence, ProblemSpec};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn jordan2(e: C64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![e, c(1.0, 0.0)], vec![c(0.0, 0.0), e]]).unwrap()
}

fn region() -> Region {
    Region::new(1.0, 4.0, -4.0, 4.0).unwrap()
}

/// Off-axis points with moduli in `[0.2, 0.95]`.
fn spiral(count: usize) -> Vec<C64> {
    (0..count)
        .map(|i| {
            let t = i as f64 / count as f64;
            C64::from_polar(0.2 + 0.75 * t, 0.35 + 2.3 * t)
        })
        .collect()
}

fn catalan_bound() -> Outcome {
    let mut worst: f64 = 0.0;
    for mu in [1.0, 1.5, 2.0, 3.0, 5.0, 8.0] {
        let e = 4.0 - 6.0 / (mu + 1.0);
        let b = jordan2(c(e, 0.0));
        let report = check_h2(&b, &MomentSequence::Catalan, c(mu, 0.0), 10_000).map_err(|e| e.to_string())?;
        let sup = report.bound_c.ok_or("resonance reported")?;
        let x = (mu + 1.0) * (mu + 2.0);
        let envelope = x * (x + 6.0) / 36.0;
        let gap = (sup - envelope).abs() / envelope;
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("μ={mu}: sup {sup} vs envelope {envelope}"))?;
        ensure(report.checked_up_to == 10_000, || "scan stopped early".into())?;
        if mu == 1.0 {
            ensure((sup - 2.0).abs() <= 2e-9 && report.argmax_p == Some(1), || {
                format!("μ=1: sup {sup} at p={:?}", report.argmax_p)
            })?;
        }
    }
    // complex exponents stay under the envelope
    for mu in [c(1.0, 0.5), c(2.0, -1.0), c(3.0, 2.0)] {
        let e = c(4.0, 0.0) - 6.0 / (mu + 1.0);
        let sup = check_h2(&jordan2(e), &MomentSequence::Catalan, mu, 10_000)
            .map_err(|e| e.to_string())?
            .bound_c
            .ok_or("resonance reported")?;
        let x = ((mu + 1.0) * (mu + 2.0)).norm();
        ensure(sup <= x * (x + 6.0) / 36.0 * (1.0 + 1e-9), || format!("μ={mu}: sup {sup} above envelope"))?;
    }
    Ok(format!("sup matches envelope to {worst:.1e}; sup=2 at μ=1, p=1"))
}

fn classical_scalar() -> Outcome {
    let (a, b) = (1.3, 2.2);
    let spec = ProblemSpec::new(
        ComplexMatrix::diag(&[c(a, 0.0)]),
        ComplexMatrix::diag(&[c(b, 0.0)]),
        MomentSequence::Factorial,
        30,
    )
    .map_err(|e| e.to_string())?;
    let sol = floquet_coefficients(&spec, c(b, 0.0), &[c(1.0, 0.0)]).map_err(|e| e.to_string())?;
    let mut expect = 1.0;
    let mut coeff_gap: f64 = 0.0;
    for (p, s) in sol.series.coeffs().iter().enumerate() {
        if p > 0 {
            expect *= a / p as f64;
        }
        coeff_gap = coeff_gap.max((s[0] - expect).norm() / expect);
    }
    ensure(coeff_gap <= 1e-10, || format!("coefficient gap {coeff_gap:e}"))?;
    let mut eval_gap: f64 = 0.0;
    for i in 1..=20 {
        let z = i as f64 / 20.0;
        let y = sol.evaluate(c(z, 0.0)).map_err(|e| e.to_string())?[0];
        let exact = z.powf(b) * (a * z).exp();
        eval_gap = eval_gap.max((y.re - exact).abs().max(y.im.abs()) / exact);
    }
    ensure(eval_gap <= 1e-9, || format!("evaluation gap {eval_gap:e}"))?;
    Ok(format!("coefficients {coeff_gap:.1e}, evaluation {eval_gap:.1e}"))
}

fn residual_suite() -> Outcome {
    const ORDER: usize = 20;
    let mut worst: f64 = 0.0;
    let mut solutions = 0;
    let mut cases = 0;
    let mut r = rng(2024);
    for seq in builtin_sequences() {
        for k in 0..10 {
            let n = 1 + k % 3;
            cases += 1;
            let (a, b, mus) = random_problem(&mut r, &seq, n);
            let spec = ProblemSpec::new(a.clone(), b.clone(), seq.clone(), ORDER).map_err(|e| e.to_string())?;
            let tag = |what: &str| format!("{seq} case {k} (n={n}) {what}");

            let basis = floquet_basis(&spec, &region()).map_err(|e| tag(&e.to_string()))?;
            ensure(basis.len() == n, || tag(&format!("basis has {} solutions", basis.len())))?;
            for sol in &basis {
                worst = worst.max(residual(sol, &spec));
                solutions += 1;
            }

            let z = zmb_diagonalizable(&b, &seq, &region()).map_err(|e| tag(&e.to_string()))?;
            worst = worst.max(z.defect);
            solutions += z.n();

            if n == 2 {
                let planar = planar_diagonal(&a, &seq, mus[0], mus[1], ORDER).map_err(|e| tag(&e.to_string()))?;
                let pspec = ProblemSpec::new(a.clone(), ComplexMatrix::diag(&[seq.ratio(mus[0]).unwrap(), seq.ratio(mus[1]).unwrap()]), seq.clone(), ORDER).unwrap();
                worst = worst.max(residual(&planar.first, &pspec)).max(residual(&planar.second, &pspec));

                let jb = jordan2(seq.ratio(mus[0]).unwrap());
                let jordan = planar_jordan(&a, &seq, mus[0], ORDER, None).map_err(|e| tag(&e.to_string()))?;
                let jspec = ProblemSpec::new(a.clone(), jb, seq.clone(), ORDER).unwrap();
                worst = worst.max(residual(&jordan.first, &jspec));
                solutions += 3;
                if let Some(res) = jordan.second_residual {
                    worst = worst.max(res);
                    solutions += 1;
                }
            }
            ensure(worst <= 1e-10, || tag(&format!("residual {worst:e}")))?;
        }
    }
    Ok(format!("{cases} cases, {solutions} solutions, max residual {worst:.1e}"))
}

fn change_of_variable_equivalence() -> Outcome {
    const ORDER: usize = 15;
    let mut worst: f64 = 0.0;
    for seq in builtin_sequences() {
        let mut r = rng(77);
        for k in 0..20 {
            let n = 1 + k % 3;
            let case = commuting_case(&mut r, &seq, n, ORDER);
            let cov = change_of_variable(&case.a, &case.b, &seq, case.mu, case.lambda, ORDER).map_err(|e| e.to_string())?;
            let solve = |a: ComplexMatrix| {
                let spec = ProblemSpec::new(a, case.b.clone(), seq.clone(), ORDER)?;
                floquet_coefficients(&spec, case.mu, &case.s0)
            };
            let direct = solve(case.a.clone()).map_err(|e| e.to_string())?;
            let reduced = solve(case.a.shift(-case.lambda)).map_err(|e| e.to_string())?;
            let mapped = cov.apply(&reduced.series).map_err(|e| e.to_string())?;
            let scale = direct.series.max_norm();
            for (x, y) in mapped.coeffs().iter().zip(direct.series.coeffs()) {
                let gap: f64 = x.iter().zip(y).map(|(u, v)| (u - v).norm()).sum::<f64>() / scale;
                worst = worst.max(gap);
            }
            ensure(worst <= 1e-9, || format!("{seq} pair {k}: gap {worst:e}"))?;
        }
    }
    let lambda = c(0.7, -0.4);
    let b = ComplexMatrix::scalar(2, c(2.0, 0.0));
    let a = ComplexMatrix::from_real_rows(&[vec![0.3, 0.1], vec![0.2, -0.4]]).unwrap();
    let cov = change_of_variable(&a, &b, &MomentSequence::Factorial, c(2.0, 0.0), lambda, 20).map_err(|e| e.to_string())?;
    let mut fact = 1.0;
    let mut h_gap: f64 = 0.0;
    for (p, h) in cov.h.coeffs().iter().enumerate() {
        if p > 0 {
            fact *= p as f64;
        }
        let expect = ComplexMatrix::scalar(2, lambda.powu(p as u32) / fact);
        h_gap = h_gap.max((h - &expect).one_norm());
    }
    ensure(h_gap <= 1e-12, || format!("Factorial h_p gap {h_gap:e}"))?;
    Ok(format!("80 pairs, max gap {worst:.1e}; Factorial h_p = λ^p/p! to {h_gap:.1e}"))
}

fn planar_closed_forms() -> Outcome {
    const ORDER: usize = 12;
    let seqs = builtin_sequences();
    let mut summary = Vec::new();
    for (branch, traceless, diagonal) in [
        ("diagonal λ≠0", false, true),
        ("diagonal λ=0", true, true),
        ("Jordan λ≠0", false, false),
        ("Jordan λ=0", true, false),
    ] {
        let mut worst: f64 = 0.0;
        for draw in 0..50u64 {
            let seq = &seqs[draw as usize % seqs.len()];
            let mut r = rng(1000 + draw);
            let a = rank_one_planar(&mut r, traceless);
            let mus = common::random_exponents(&mut r, 2);
            let deviation = if diagonal {
                planar_diagonal(&a, seq, mus[0], mus[1], ORDER).map_err(|e| e.to_string())?.closed_form_deviation
            } else {
                planar_jordan(&a, seq, mus[0], ORDER, None).map_err(|e| e.to_string())?.closed_form_deviation
            };
            let d = deviation.ok_or_else(|| format!("{branch}: closed forms skipped"))?;
            worst = worst.max(d);
            ensure(d <= 1e-10, || format!("{branch}, {seq}, draw {draw}: deviation {d:e}"))?;
        }
        summary.push(format!("{branch} {worst:.1e}"));
    }
    Ok(format!("50 draws per branch; {}", summary.join(", ")))
}

fn q_realization() -> Outcome {
    let points = spiral(20);
    let mut worst: f64 = 0.0;
    for q in [1.5, 2.0, 3.0] {
        for k in 0..=10 {
            let mut coeffs = vec![c(0.0, 0.0); k + 1];
            coeffs[k] = c(1.0, 0.0);
            let y = GeneralizedSeries::new(c(0.0, 0.0), coeffs).unwrap();
            worst = worst.max(verify_jackson(&y, q, &points).map_err(|e| e.to_string())?);
        }
        for nu in [1.5, 2.25, 3.0] {
            let y = GeneralizedSeries::new(c(nu, 0.0), vec![c(1.0, 0.0)]).unwrap();
            worst = worst.max(verify_jackson(&y, q, &points).map_err(|e| e.to_string())?);
        }
    }
    let seq = MomentSequence::q_factorial(2.0).unwrap();
    let (a, b, _) = random_problem(&mut rng(5), &seq, 2);
    let spec = ProblemSpec::new(a, b, seq, 25).map_err(|e| e.to_string())?;
    let basis = floquet_basis(&spec, &region()).map_err(|e| e.to_string())?;
    ensure(basis.len() == 2, || format!("QFactorial(2) basis has {} solutions", basis.len()))?;
    for sol in &basis {
        worst = worst.max(verify_jackson(&sol.series, 2.0, &points).map_err(|e| e.to_string())?);
    }
    ensure(worst <= 1e-10, || format!("Jackson deviation {worst:e}"))?;
    let mut gamma_gap: f64 = 0.0;
    for q in [1.5, 2.0, 3.0] {
        for mu in 2..=10 {
            let z = c(mu as f64, 0.0);
            let ratio = q_gamma(q, z).map_err(|e| e.to_string())? / q_gamma(q, z - 1.0).map_err(|e| e.to_string())?;
            let expect = (q.powi(mu - 1) - 1.0) / (q - 1.0);
            gamma_gap = gamma_gap.max((ratio - expect).norm() / expect);
        }
    }
    ensure(gamma_gap <= 1e-10, || format!("Γ_q ratio gap {gamma_gap:e}"))?;
    Ok(format!("Jackson deviation {worst:.1e}; Γ_q ratio {gamma_gap:.1e}"))
}

fn generalized_power() -> Outcome {
    let mu = c(2.0, 0.0);
    let b = jordan2(mu);
    let z = zmb_general(&b, &MomentSequence::Factorial, &Region::default(), None, None).map_err(|e| e.to_string())?;
    ensure(z.defect == 0.0, || format!("symbolic defect {}", z.defect))?;
    let verified = z.verify(&b, &MomentSequence::Factorial).map_err(|e| e.to_string())?;
    ensure(verified == 0.0, || format!("symbolic verification {verified}"))?;
    let log_column = SolutionColumn::LogPower(vec![
        LogPowerSolution::single(mu, 1, vec![c(1.0, 0.0)]),
        LogPowerSolution::monomial(mu),
    ]);
    ensure(z.columns[1] == log_column, || format!("second column {:?}", z.columns[1]))?;
    let mut worst: f64 = 0.0;
    for at in spiral(10) {
        let m = z.evaluate(at).map_err(|e| e.to_string())?;
        let zm = at.powc(mu);
        let expect = ComplexMatrix::from_rows(&[vec![zm, zm * at.ln()], vec![c(0.0, 0.0), zm]]).unwrap();
        worst = worst.max((&m - &expect).one_norm() / expect.one_norm());
    }
    let exps = [c(1.5, 0.0), c(2.0, 0.0), c(3.25, 0.5)];
    let d = zmb_diagonalizable(&ComplexMatrix::diag(&exps), &MomentSequence::Factorial, &Region::default())
        .map_err(|e| e.to_string())?;
    ensure(d.defect == 0.0, || format!("diagonal defect {}", d.defect))?;
    for at in spiral(10) {
        let expect = ComplexMatrix::diag(&exps.map(|e| at.powc(e)));
        let m = d.evaluate(at).map_err(|e| e.to_string())?;
        worst = worst.max((&m - &expect).one_norm() / expect.one_norm());
    }
    ensure(worst <= 1e-14, || format!("evaluation gap {worst:e}"))?;
    Ok(format!("symbolic defect 0, log column exact, evaluation {worst:.1e}"))
}

fn q_h_functions_check() -> Outcome {
    let (q, mu) = (2.0, c(1.0, 0.0));
    let f = q_h_functions(q, mu, 1).map_err(|e| e.to_string())?;
    let e = f.eigenvalue();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let z = C64::from_polar(0.15 + 0.06 * i as f64, 0.3 + 0.11 * i as f64);
        let h2 = f.h(2, z).map_err(|e| e.to_string())?;
        let d = f.h(2, z * q).map_err(|e| e.to_string())? - (1.0 + (q - 1.0) * e) * h2 - (q - 1.0) * z.powc(mu);
        worst = worst.max(d.norm() / h2.norm().max(1.0));
    }
    ensure(worst <= 1e-8, || format!("H₂ defect {worst:e}"))?;
    let mut theta_gap: f64 = 0.0;
    for q in [1.5, 2.0, 3.0] {
        for i in 0..40 {
            let z = C64::from_polar(0.5 + 1.5 * (i % 8) as f64 / 7.0, -2.6 + 5.2 * (i / 8) as f64 / 4.0);
            let lhs = theta_q(q, z * q).map_err(|e| e.to_string())?;
            let rhs = z * q * theta_q(q, z).map_err(|e| e.to_string())?;
            theta_gap = theta_gap.max((lhs - rhs).norm() / rhs.norm());
        }
    }
    ensure(theta_gap <= 1e-10, || format!("theta gap {theta_gap:e}"))?;
    Ok(format!("H₂ defect {worst:.1e} at 50 points; theta {theta_gap:.1e}"))
}

fn hypothesis_detection() -> Outcome {
    let b = ComplexMatrix::diag(&[c(1.0, 0.0), c(3.0, 0.0)]);
    let v = check_h1(&b, &MomentSequence::Factorial, c(1.0, 0.0), 10_000).map_err(|e| e.to_string())?;
    ensure(!v.holds && v.resonances.first() == Some(&2), || format!("resonances {:?}", v.resonances))?;
    ensure(
        matches!(planar_diagonal(&ComplexMatrix::identity(2), &MomentSequence::Factorial, c(1.0, 0.0), c(3.0, 0.0), 4), Err(Error::Resonant { p: 2, .. })),
        || "planar solver accepted the resonant pair".into(),
    )?;
    // μ = 1/2 lies below the admissible half-plane; N = 1 moves it to 3/2
    let mu = c(0.5, 0.0);
    let seq = MomentSequence::Factorial;
    let b = ComplexMatrix::diag(&[seq.ratio(mu + 1.0).unwrap(), c(4.75, 0.0)]);
    ensure(matches!(check_h1(&b, &seq, mu, 100), Err(Error::Domain(_))), || "unshifted check accepted Re(μ)<1".into())?;
    let shifted = check_h1_shifted(&b, &seq, mu, 1, 10_000).map_err(|e| e.to_string())?;
    ensure(shifted.holds && shifted.n_offset == 1, || format!("shifted verdict {shifted:?}"))?;
    let spec = ProblemSpec::new(ComplexMatrix::from_real_rows(&[vec![0.2, 0.1], vec![0.0, 0.3]]).unwrap(), b, seq, 20).unwrap();
    let sol = floquet_coefficients(&spec, shifted.mu, &shifted.eigvec.unwrap()).map_err(|e| e.to_string())?;
    let res = residual(&sol, &spec);
    ensure(res <= 1e-10, || format!("shifted solution residual {res:e}"))?;
    Ok(format!("resonance at p=2 rejected; (H1)' accepts μ=0.5 with N=1 (residual {res:.1e})"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Catalan bound", catalan_bound),
        ("classical scalar oracle", classical_scalar),
        ("residual suite", residual_suite),
        ("change of variable", change_of_variable_equivalence),
        ("planar closed forms", planar_closed_forms),
        ("q-realization", q_realization),
        ("z_m^B", generalized_power),
        ("q H-functions", q_h_functions_check),
        ("hypothesis detection", hypothesis_detection),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
