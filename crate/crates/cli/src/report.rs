//! Human-readable report with a fixed field order.

use std::fmt::Write;

use crate::dto::*;

const SHOWN_COEFFS: usize = 5;

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), num)
}

fn cnum(p: Pair) -> String {
    let sign = if p[1].is_sign_negative() { '-' } else { '+' };
    format!("{} {sign} {}i", num(p[0]), num(p[1].abs()))
}

fn cvec(v: &[Pair]) -> String {
    let parts: Vec<String> = v.iter().map(|&p| cnum(p)).collect();
    format!("[{}]", parts.join(", "))
}

fn write_report(out: &mut String, r: &ReportDto) -> std::fmt::Result {
    let h1 = &r.h1;
    writeln!(out, "  mu = {}", cnum(h1.mu))?;
    writeln!(out, "    ratio(mu) = {}", cnum(h1.ratio_at_mu))?;
    writeln!(
        out,
        "    H1: {} (eigenvalue of B: {}, checked p <= {}, offset {})",
        if h1.holds { "holds" } else { "fails" },
        if h1.in_spectrum { "yes" } else { "no" },
        h1.checked_up_to,
        h1.n_offset
    )?;
    if !h1.resonances.is_empty() {
        writeln!(out, "    resonances:")?;
        writeln!(out, "      {:>6}  ratio(mu + p)", "p")?;
        for res in &h1.resonances {
            writeln!(out, "      {:>6}  {}", res.p, cnum(res.ratio))?;
        }
    }
    match &r.h2 {
        Some(h2) => {
            writeln!(
                out,
                "    H2: bound_C = {} at p = {}, checked p <= {}, monotone tail: {}",
                opt(h2.bound_c),
                h2.argmax_p.map_or_else(|| "n/a".into(), |p| p.to_string()),
                h2.checked_up_to,
                if h2.monotone_tail_flag { "yes" } else { "no" }
            )?;
            if let Some(p) = h2.resonance {
                writeln!(out, "    H2: resonant at p = {p}")?;
            }
            if let Some(note) = &h2.note {
                writeln!(out, "    H2 note: {note}")?;
            }
        }
        None => writeln!(out, "    H2: not evaluated")?,
    }
    let nc = &r.norm_criterion;
    writeln!(
        out,
        "    norm criterion: {} (|B| = {}, min |ratio| = {}, margin = {})",
        if nc.holds { "holds" } else { "fails" },
        num(nc.norm_b),
        opt(nc.min_abs_ratio),
        opt(nc.margin)
    )
}

fn write_solution(out: &mut String, k: usize, s: &SolutionDto) -> std::fmt::Result {
    match s {
        SolutionDto::Series { label, series, residual, geometric_rate_estimate, .. } => {
            writeln!(out, "  [{k}] {label}: series, mu = {}", cnum(series.nu))?;
            writeln!(out, "      residual = {}", opt(*residual))?;
            writeln!(out, "      geometric rate = {}", opt(*geometric_rate_estimate))?;
            for (p, c) in series.coeffs.iter().take(SHOWN_COEFFS).enumerate() {
                writeln!(out, "      s_{p} = {}", cvec(c))?;
            }
            for (j, rows) in &series.log_terms {
                for (p, c) in rows.iter().take(SHOWN_COEFFS).enumerate() {
                    writeln!(out, "      log^{j} s_{p} = {}", cvec(c))?;
                }
            }
        }
        SolutionDto::Symbolic { label, display, residual, .. } => {
            writeln!(out, "  [{k}] {label}: symbolic")?;
            writeln!(out, "      residual = {}", opt(*residual))?;
            for row in display {
                writeln!(out, "      | {} |", row.join(" | "))?;
            }
        }
    }
    Ok(())
}

fn write_bundle(out: &mut String, b: &ResultBundle) -> std::fmt::Result {
    let mode = serde_json::to_value(b.mode).ok();
    let status = serde_json::to_value(b.status).ok();
    let text = |v: Option<serde_json::Value>| v.and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    writeln!(out, "mode: {}", text(mode))?;
    writeln!(out, "sequence: {}", b.sequence)?;
    writeln!(out, "status: {}", text(status))?;
    if let Some(e) = &b.error {
        writeln!(out, "error: {}: {}", e.kind, e.message)?;
    }
    if !b.hypothesis_reports.is_empty() {
        writeln!(out, "hypotheses:")?;
        for r in &b.hypothesis_reports {
            write_report(out, r)?;
        }
    }
    if b.solutions.is_empty() {
        if b.error.is_none() && b.mode != Mode::Check {
            writeln!(out, "no Floquet solutions found in region")?;
        }
    } else {
        writeln!(out, "solutions:")?;
        for (k, s) in b.solutions.iter().enumerate() {
            write_solution(out, k, s)?;
        }
    }
    if let Some(t) = &b.transform {
        writeln!(out, "transform: lambda = {}, mu = {}, order {}", cnum(t.lambda), cnum(t.mu), t.h.len() - 1)?;
    }
    if !b.diagnostics.is_empty() {
        writeln!(out, "diagnostics:")?;
        for (key, value) in &b.diagnostics {
            writeln!(out, "  {key} = {value}")?;
        }
    }
    if let Some(t) = &b.timing {
        writeln!(out, "elapsed: {:.3} ms", t.elapsed_ms)?;
    }
    Ok(())
}

pub fn format_report(bundle: &ResultBundle) -> String {
    let mut out = String::new();
    write_bundle(&mut out, bundle).expect("writing to a String");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_twelve_digits() {
        assert_eq!(num(2.0), "2.00000000000e0");
        assert_eq!(cnum([1.0, -0.5]), "1.00000000000e0 - 5.00000000000e-1i");
    }

    #[test]
    fn empty_bundle_says_so() {
        let b = ResultBundle::new(Mode::Basis, "catalan");
        let text = format_report(&b);
        assert!(text.contains("no Floquet solutions found in region"));
        assert!(text.starts_with("mode: basis\nsequence: catalan\nstatus: ok\n"));
    }
}
