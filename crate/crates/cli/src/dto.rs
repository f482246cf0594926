//! Serialized forms: TOML problem files in, JSON result bundles out.
//! Complex numbers are always `[re, im]`.

use std::collections::BTreeMap;

use momentsys::moments::Region;
use momentsys::{ComplexMatrix, Complex64 as C64, JordanDecomposition, MomentSequence, ProblemSpec, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Pair = [f64; 2];
pub type MatrixRows = Vec<Vec<Pair>>;

pub const FORMAT_VERSION: u32 = 1;

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn pairs(v: &[C64]) -> Vec<Pair> {
    v.iter().copied().map(pair).collect()
}

pub fn rows(m: &ComplexMatrix) -> MatrixRows {
    m.rows().iter().map(|r| pairs(r)).collect()
}

/// `None` for non-finite values, which JSON cannot carry.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    Basis,
    Zmb,
    Planar,
    Check,
    VerifyJackson,
    ChangeOfVariable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuSpec {
    Auto(AutoKeyword),
    Value(Pair),
}

impl Default for MuSpec {
    fn default() -> Self {
        MuSpec::Auto(AutoKeyword::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanHint {
    #[serde(rename = "P")]
    pub p: MatrixRows,
    #[serde(rename = "J")]
    pub j: MatrixRows,
}

fn default_p_max() -> usize {
    momentsys::solver::DEFAULT_P_MAX
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub sequence: String,
    #[serde(default)]
    pub mu: MuSpec,
    pub truncation: usize,
    #[serde(default = "default_p_max")]
    pub p_max: usize,
    #[serde(default)]
    pub n_offset: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Pair>,
    /// `[re_min, re_max, im_min, im_max]` for exponent searches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<[f64; 4]>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(rename = "A")]
    pub a: MatrixRows,
    #[serde(rename = "B")]
    pub b: MatrixRows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jordan_hint: Option<JordanHint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub version: u32,
    pub problem: Problem,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ProblemFile = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if file.version != FORMAT_VERSION {
            return Err(CliError::Parse(format!(
                "unsupported problem file version {}",
                file.version
            )));
        }
        Ok(file)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Parse(e.to_string()))
    }
}

fn matrix(name: &str, rows: &MatrixRows) -> Result<ComplexMatrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Parse(format!("{name} must be a non-empty square matrix")));
    }
    let values: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().copied().map(complex).collect()).collect();
    Ok(ComplexMatrix::from_rows(&values)?)
}

/// A problem with every field checked and converted.
#[derive(Debug, Clone)]
pub struct Validated {
    pub spec: ProblemSpec,
    pub mu: Option<C64>,
    pub n_offset: usize,
    pub lambda: Option<C64>,
    pub region: Region,
    pub hint: Option<JordanDecomposition>,
}

impl Problem {
    pub fn validate(&self) -> Result<Validated, CliError> {
        let seq: MomentSequence = self
            .sequence
            .parse()
            .map_err(|e: momentsys::Error| CliError::Parse(e.to_string()))?;
        let a = matrix("A", &self.a)?;
        let b = matrix("B", &self.b)?;
        if a.n() != b.n() {
            return Err(CliError::Parse(format!(
                "A is {0}x{0} but B is {1}x{1}",
                a.n(),
                b.n()
            )));
        }
        if self.truncation < 1 {
            return Err(CliError::Parse("truncation must be at least 1".into()));
        }
        let mut tol = Tolerances::default();
        for (key, value) in &self.tolerances {
            match key.as_str() {
                "spec" => tol.spec = *value,
                "res" => tol.res = *value,
                other => return Err(CliError::Parse(format!("unknown tolerance '{other}'"))),
            }
        }
        let hint = self
            .jordan_hint
            .as_ref()
            .map(|h| -> Result<_, CliError> {
                Ok(JordanDecomposition::from_jordan_matrix(matrix("P", &h.p)?, matrix("J", &h.j)?)?)
            })
            .transpose()?;
        let region = match self.region {
            Some([r0, r1, i0, i1]) => Region::new(r0, r1, i0, i1)?,
            None => Region::default(),
        };
        let spec = ProblemSpec::new(a, b, seq, self.truncation)?
            .with_p_max(self.p_max)
            .with_tolerances(tol);
        Ok(Validated {
            spec,
            mu: match self.mu {
                MuSpec::Auto(_) => None,
                MuSpec::Value(p) => Some(complex(p)),
            },
            n_offset: self.n_offset,
            lambda: self.lambda.map(complex),
            region,
            hint,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    HypothesisFailure,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDto {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceDto {
    pub p: usize,
    pub ratio: Pair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Dto {
    pub holds: bool,
    pub mu: Pair,
    pub ratio_at_mu: Pair,
    pub in_spectrum: bool,
    pub eigvec: Option<Vec<Pair>>,
    pub resonances: Vec<ResonanceDto>,
    pub checked_up_to: usize,
    pub n_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Dto {
    #[serde(rename = "bound_C")]
    pub bound_c: Option<f64>,
    pub argmax_p: Option<usize>,
    pub checked_up_to: usize,
    pub monotone_tail_flag: bool,
    pub resonance: Option<usize>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCriterionDto {
    pub holds: bool,
    pub norm_b: f64,
    pub min_abs_ratio: Option<f64>,
    pub margin: Option<f64>,
    pub sup_ratio_inverse: Option<f64>,
    pub checked_up_to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDto {
    pub h1: H1Dto,
    pub h2: Option<H2Dto>,
    pub norm_criterion: NormCriterionDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogTermDto {
    pub log_power: usize,
    pub poly: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPowerDto {
    pub mu: Pair,
    pub terms: Vec<LogTermDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnDto {
    Monomial { mu: Pair, s0: Vec<Pair> },
    LogPower { entries: Vec<LogPowerDto> },
    /// Parameters of the H-functions, not their values.
    QTheta { q: f64, c: Pair, mu: Pair, count: usize, weights: MatrixRows },
}

/// `Σ_p (coeffs[p] + Σ_k log_terms[k][p] log(z)^k) z^{nu+p}`; the keys
/// of `log_terms` are the powers `k` written in decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDto {
    pub nu: Pair,
    pub coeffs: MatrixRows,
    #[serde(default)]
    pub log_terms: BTreeMap<String, MatrixRows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionDto {
    Series {
        label: String,
        series: SeriesDto,
        residual: Option<f64>,
        coeff_growth: Vec<Option<f64>>,
        geometric_rate_estimate: Option<f64>,
    },
    Symbolic {
        label: String,
        columns: Vec<ColumnDto>,
        display: Vec<Vec<String>>,
        residual: Option<f64>,
    },
}

impl SolutionDto {
    pub fn label(&self) -> &str {
        match self {
            Self::Series { label, .. } | Self::Symbolic { label, .. } => label,
        }
    }

    pub fn residual(&self) -> Option<f64> {
        match self {
            Self::Series { residual, .. } | Self::Symbolic { residual, .. } => *residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformDto {
    pub lambda: Pair,
    pub mu: Pair,
    pub h: Vec<MatrixRows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingDto {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub version: u32,
    pub mode: Mode,
    pub sequence: String,
    pub status: Status,
    pub error: Option<ErrorDto>,
    pub hypothesis_reports: Vec<ReportDto>,
    pub solutions: Vec<SolutionDto>,
    /// Residual of each entry of `solutions`, in order.
    pub residuals: Vec<Option<f64>>,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
    pub transform: Option<TransformDto>,
    pub timing: Option<TimingDto>,
}

impl ResultBundle {
    pub fn new(mode: Mode, sequence: impl Into<String>) -> Self {
        Self {
            version: FORMAT_VERSION,
            mode,
            sequence: sequence.into(),
            status: Status::Ok,
            error: None,
            hypothesis_reports: Vec::new(),
            solutions: Vec::new(),
            residuals: Vec::new(),
            diagnostics: BTreeMap::new(),
            transform: None,
            timing: None,
        }
    }

    pub fn push_solution(&mut self, s: SolutionDto) {
        self.residuals.push(s.residual());
        self.solutions.push(s);
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("bundle serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }
}
