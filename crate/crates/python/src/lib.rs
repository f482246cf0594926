//! Python bindings for `momentsys`.

use momentsys::moments::{solve_ratio_equation, Region};
use momentsys::solver::{check_hypotheses, floquet_basis, floquet_coefficients, residual};
use momentsys::structure::{zmb_general, SymbolicSolutionMatrix};
use momentsys::{special, ComplexMatrix, Complex64 as C64};
use momentsys_cli::dto::{Mode, ProblemFile};
use momentsys_cli::RunOptions;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(pymomentsys, MomentsysError, PyValueError);
create_exception!(pymomentsys, ResonantError, MomentsysError);

fn err(e: momentsys::Error) -> PyErr {
    let msg = format!("{}: {e}", e.kind());
    match e {
        momentsys::Error::Resonant { .. } => ResonantError::new_err(msg),
        _ => MomentsysError::new_err(msg),
    }
}

fn matrix(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(err)
}

fn region(bounds: Option<(f64, f64, f64, f64)>) -> PyResult<Region> {
    match bounds {
        Some((r0, r1, i0, i1)) => Region::new(r0, r1, i0, i1).map_err(err),
        None => Ok(Region::default()),
    }
}

/// A moment sequence parsed from a descriptor such as `"qfactorial:q=2"`.
#[pyclass(module = "pymomentsys", frozen, skip_from_py_object)]
#[derive(Clone)]
struct MomentSequence {
    inner: momentsys::MomentSequence,
}

#[pymethods]
impl MomentSequence {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        Ok(Self {
            inner: descriptor.parse().map_err(err)?,
        })
    }

    /// `m(z)`.
    fn moment(&self, z: C64) -> PyResult<C64> {
        self.inner.eval_m(z).map_err(err)
    }

    fn ln_moment(&self, z: C64) -> PyResult<C64> {
        self.inner.ln_m(z).map_err(err)
    }

    /// `m(z) / m(z - 1)`.
    fn ratio(&self, z: C64) -> PyResult<C64> {
        self.inner.ratio(z).map_err(err)
    }

    /// Exponents `μ` with `ratio(μ) = value` inside `region = (re0, re1, im0, im1)`.
    #[pyo3(signature = (value, region=None))]
    fn roots(&self, value: C64, region: Option<(f64, f64, f64, f64)>) -> PyResult<Vec<C64>> {
        solve_ratio_equation(&self.inner, value, &self::region(region)?).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("MomentSequence('{}')", self.inner)
    }
}

/// The system `z ∂ₘ y = (zA + B) y` truncated at `truncation`.
#[pyclass(module = "pymomentsys", frozen)]
struct Problem {
    inner: momentsys::ProblemSpec,
}

#[pymethods]
impl Problem {
    #[new]
    #[pyo3(signature = (a, b, sequence, truncation, p_max=None))]
    fn new(
        a: Vec<Vec<C64>>,
        b: Vec<Vec<C64>>,
        sequence: &MomentSequence,
        truncation: usize,
        p_max: Option<usize>,
    ) -> PyResult<Self> {
        let mut spec =
            momentsys::ProblemSpec::new(matrix(a)?, matrix(b)?, sequence.inner.clone(), truncation).map_err(err)?;
        if let Some(p) = p_max {
            spec = spec.with_p_max(p);
        }
        Ok(Self { inner: spec })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.b.n()
    }

    #[getter]
    fn truncation(&self) -> usize {
        self.inner.order
    }

    #[getter]
    fn sequence(&self) -> MomentSequence {
        MomentSequence {
            inner: self.inner.seq.clone(),
        }
    }

    /// Hypothesis report at `mu` as a dict.
    #[pyo3(signature = (mu, n_offset=0))]
    fn check<'py>(&self, py: Python<'py>, mu: C64, n_offset: usize) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let r = check_hypotheses(&self.inner, mu, n_offset).map_err(err)?;
        let d = pyo3::types::PyDict::new(py);
        d.set_item("h1_holds", r.h1.holds)?;
        d.set_item("mu", r.h1.mu)?;
        d.set_item("ratio_at_mu", r.h1.ratio_at_mu)?;
        d.set_item("in_spectrum", r.h1.in_spectrum)?;
        d.set_item("resonances", r.h1.resonances.clone())?;
        d.set_item("bound_c", r.h2.as_ref().and_then(|h| h.bound_c))?;
        d.set_item("argmax_p", r.h2.as_ref().and_then(|h| h.argmax_p))?;
        d.set_item("norm_criterion_holds", r.coro1.holds)?;
        Ok(d)
    }

    /// Floquet solution at `mu` starting from the eigenvector `s0`.
    fn solve(&self, mu: C64, s0: Vec<C64>) -> PyResult<FloquetSolution> {
        let sol = floquet_coefficients(&self.inner, mu, &s0).map_err(err)?;
        Ok(FloquetSolution::new(sol, &self.inner))
    }

    /// Independent Floquet solutions with exponents in `region`.
    #[pyo3(signature = (region=None))]
    fn basis(&self, region: Option<(f64, f64, f64, f64)>) -> PyResult<Vec<FloquetSolution>> {
        let found = floquet_basis(&self.inner, &self::region(region)?).map_err(err)?;
        Ok(found.into_iter().map(|s| FloquetSolution::new(s, &self.inner)).collect())
    }
}

#[pyclass(module = "pymomentsys", frozen)]
struct FloquetSolution {
    inner: momentsys::FloquetSolution,
    #[pyo3(get)]
    residual: f64,
}

impl FloquetSolution {
    fn new(inner: momentsys::FloquetSolution, spec: &momentsys::ProblemSpec) -> Self {
        let residual = residual(&inner, spec);
        Self { inner, residual }
    }
}

#[pymethods]
impl FloquetSolution {
    #[getter]
    fn mu(&self) -> C64 {
        self.inner.mu
    }

    #[getter]
    fn coefficients(&self) -> Vec<Vec<C64>> {
        self.inner.series.coeffs().to_vec()
    }

    #[getter]
    fn geometric_rate(&self) -> f64 {
        self.inner.diagnostics.geometric_rate_estimate
    }

    /// Truncated series value at `z`.
    fn __call__(&self, z: C64) -> PyResult<Vec<C64>> {
        self.inner.evaluate(z).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "FloquetSolution(mu={}, order={}, residual={:e})",
            self.inner.mu,
            self.inner.series.order(),
            self.residual
        )
    }
}

/// The generalized matrix power `z_m^B`, one column per generalized eigenvector.
#[pyclass(module = "pymomentsys", frozen)]
struct MatrixPower {
    inner: SymbolicSolutionMatrix,
}

#[pymethods]
impl MatrixPower {
    #[new]
    #[pyo3(signature = (b, sequence, region=None))]
    fn new(b: Vec<Vec<C64>>, sequence: &MomentSequence, region: Option<(f64, f64, f64, f64)>) -> PyResult<Self> {
        let inner = zmb_general(&matrix(b)?, &sequence.inner, &self::region(region)?, None, None).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn column_kinds(&self) -> Vec<&'static str> {
        self.inner.columns.iter().map(|c| c.kind()).collect()
    }

    #[getter]
    fn exponents(&self) -> Vec<C64> {
        self.inner.columns.iter().map(|c| c.mu()).collect()
    }

    #[getter]
    fn defect(&self) -> f64 {
        self.inner.defect
    }

    /// Rows of the matrix evaluated at `z`.
    fn __call__(&self, z: C64) -> PyResult<Vec<Vec<C64>>> {
        let cols = self
            .inner
            .columns
            .iter()
            .map(|c| c.evaluate(z))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let n = self.inner.n();
        Ok((0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect())
    }
}

#[pyfunction]
fn ln_gamma(z: C64) -> PyResult<C64> {
    special::ln_gamma(z).map_err(err)
}

#[pyfunction]
fn q_gamma(q: f64, z: C64) -> PyResult<C64> {
    special::q_gamma(q, z).map_err(err)
}

#[pyfunction]
fn q_bracket(q: f64, z: C64) -> PyResult<C64> {
    special::q_bracket(q, z).map_err(err)
}

#[pyfunction]
fn theta_q(q: f64, z: C64) -> PyResult<C64> {
    special::theta_q(q, z).map_err(err)
}

/// Runs a TOML problem file the way the command line does and returns the
/// JSON result bundle.
#[pyfunction]
#[pyo3(signature = (toml, mode=None))]
fn run_problem(toml: &str, mode: Option<&str>) -> PyResult<String> {
    let file = ProblemFile::parse(toml).map_err(|e| MomentsysError::new_err(e.to_string()))?;
    let mode = match mode {
        Some(m) => serde_json::from_value::<Mode>(serde_json::Value::String(m.into()))
            .map_err(|_| MomentsysError::new_err(format!("unknown mode '{m}'")))?,
        None => file.problem.mode.unwrap_or(Mode::Solve),
    };
    Ok(momentsys_cli::execute(&file.problem, mode, &RunOptions::default()).to_json())
}

#[pymodule]
fn pymomentsys(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MomentsysError", m.py().get_type::<MomentsysError>())?;
    m.add("ResonantError", m.py().get_type::<ResonantError>())?;
    m.add_class::<MomentSequence>()?;
    m.add_class::<Problem>()?;
    m.add_class::<FloquetSolution>()?;
    m.add_class::<MatrixPower>()?;
    m.add_function(wrap_pyfunction!(ln_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(q_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(q_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(theta_q, m)?)?;
    m.add_function(wrap_pyfunction!(run_problem, m)?)?;
    Ok(())
}
