//! Files on disk: atomic writes, CSV exports and directory batches.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use momentsys::structure::{q_h_functions, SolutionColumn};
use momentsys::{Complex64 as C64, GeneralizedSeries, LogPowerSolution};
use rayon::prelude::*;

use crate::dto::*;
use crate::error::CliError;
use crate::report::format_report;
use crate::run::{execute, exit_code, record_error, RunOptions};

/// Points `t e^{iπ/4}` of the evaluation ray; off the real axis so that
/// theta zeros are never hit.
pub const EVAL_POINTS: usize = 20;

#[derive(Debug, Clone, Default)]
pub struct OutputOptions {
    /// Output stem; `None` writes next to the input.
    pub out: Option<PathBuf>,
    pub csv: bool,
    pub quiet: bool,
}

/// Writes through a temporary file in the same directory, then renames.
/// Missing parent directories are created.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn series_of(mu: Pair, rows: &MatrixRows) -> Result<GeneralizedSeries<Vec<C64>>, CliError> {
    let coeffs = rows.iter().map(|r| r.iter().copied().map(complex).collect()).collect();
    Ok(GeneralizedSeries::new(complex(mu), coeffs)?)
}

fn column_of(col: &ColumnDto) -> Result<SolutionColumn, CliError> {
    let to_c = |v: &[Pair]| v.iter().copied().map(complex).collect::<Vec<_>>();
    Ok(match col {
        ColumnDto::Monomial { mu, s0 } => SolutionColumn::Monomial { s0: to_c(s0), mu: complex(*mu) },
        ColumnDto::LogPower { entries } => SolutionColumn::LogPower(
            entries
                .iter()
                .map(|e| {
                    let terms: BTreeMap<usize, Vec<C64>> =
                        e.terms.iter().map(|t| (t.log_power, to_c(&t.poly))).collect();
                    LogPowerSolution::new(complex(e.mu), terms)
                })
                .collect(),
        ),
        ColumnDto::QTheta { q, mu, count, weights, .. } => SolutionColumn::QTheta {
            functions: q_h_functions(*q, complex(*mu), *count)?,
            weights: weights.iter().map(|r| to_c(r)).collect(),
        },
    })
}

/// Values of one solution at `z`, one vector per column.
fn evaluate(s: &SolutionDto, z: C64) -> Result<Vec<Vec<C64>>, CliError> {
    match s {
        SolutionDto::Series { series, .. } => {
            let mut y = series_of(series.nu, &series.coeffs)?.evaluate(z)?;
            for (k, rows) in &series.log_terms {
                let k: u32 = k
                    .parse()
                    .map_err(|_| CliError::Parse(format!("log power '{k}' is not an integer")))?;
                let factor = z.ln().powu(k);
                for (acc, v) in y.iter_mut().zip(series_of(series.nu, rows)?.evaluate(z)?) {
                    *acc += factor * v;
                }
            }
            Ok(vec![y])
        }
        SolutionDto::Symbolic { columns, .. } => columns
            .iter()
            .map(|c| Ok(column_of(c)?.evaluate(z)?))
            .collect(),
    }
}

/// `solution,part,p,re_0,im_0,...`; `part` is `coeff` or `log<k>` for the `log(z)^k` terms.
pub fn coeffs_csv(bundle: &ResultBundle) -> String {
    let n = bundle.solutions.iter().find_map(|s| match s {
        SolutionDto::Series { series, .. } => series.coeffs.first().map(Vec::len),
        SolutionDto::Symbolic { .. } => None,
    });
    let mut out = String::from("solution,part,p");
    for i in 0..n.unwrap_or(0) {
        let _ = write!(out, ",re_{i},im_{i}");
    }
    out.push('\n');
    let mut rows = |k: usize, part: &str, coeffs: &MatrixRows| {
        for (p, c) in coeffs.iter().enumerate() {
            let _ = write!(out, "{k},{part},{p}");
            for v in c {
                let _ = write!(out, ",{:e},{:e}", v[0], v[1]);
            }
            out.push('\n');
        }
    };
    for (k, s) in bundle.solutions.iter().enumerate() {
        match s {
            SolutionDto::Series { series, .. } => {
                rows(k, "coeff", &series.coeffs);
                for (j, log_rows) in &series.log_terms {
                    rows(k, &format!("log{j}"), log_rows);
                }
            }
            SolutionDto::Symbolic { .. } => {}
        }
    }
    out
}

/// `solution,column,t,re_z,im_z,re_0,im_0,...` along the ray; failed
/// evaluations leave the value fields empty.
pub fn eval_csv(bundle: &ResultBundle) -> String {
    let dir = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let mut lines = Vec::new();
    let mut width = 0;
    for (k, s) in bundle.solutions.iter().enumerate() {
        for step in 1..=EVAL_POINTS {
            let t = step as f64 / EVAL_POINTS as f64;
            let z = dir * t;
            match evaluate(s, z) {
                Ok(columns) => {
                    for (j, y) in columns.iter().enumerate() {
                        width = width.max(y.len());
                        let mut line = format!("{k},{j},{t},{:e},{:e}", z.re, z.im);
                        for v in y {
                            let _ = write!(line, ",{:e},{:e}", v.re, v.im);
                        }
                        lines.push(line);
                    }
                }
                Err(_) => lines.push(format!("{k},,{t},{:e},{:e}", z.re, z.im)),
            }
        }
    }
    let mut out = String::from("solution,column,t,re_z,im_z");
    for i in 0..width {
        let _ = write!(out, ",re_{i},im_{i}");
    }
    out.push('\n');
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// Everything produced for one input file.
#[derive(Debug, Clone)]
pub struct FileOutcome {
    pub input: PathBuf,
    pub bundle: ResultBundle,
    pub report: String,
    pub exit_code: i32,
    pub written: Vec<PathBuf>,
}

fn load(path: &Path) -> Result<ProblemFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ProblemFile::parse(&text)
}

/// How the mode of a run is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    /// Ignore the mode named in the file.
    Forced(Mode),
    /// Use the file's mode, or this one when it names none.
    Fallback(Mode),
}

impl ModeChoice {
    fn resolve(self, from_file: Option<Mode>) -> Mode {
        match self {
            Self::Forced(m) => m,
            Self::Fallback(m) => from_file.unwrap_or(m),
        }
    }
}

/// Parses and runs one file.
pub fn run_file(path: &Path, mode: ModeChoice, opts: &RunOptions) -> ResultBundle {
    match load(path) {
        Ok(file) => execute(&file.problem, mode.resolve(file.problem.mode), opts),
        Err(e) => {
            let mut bundle = ResultBundle::new(mode.resolve(None), "");
            record_error(&mut bundle, &e);
            bundle
        }
    }
}

/// Runs `path` and writes `<stem>.json` plus the CSV files when asked.
pub fn process_file(
    path: &Path,
    stem: &Path,
    mode: ModeChoice,
    run: &RunOptions,
    out: &OutputOptions,
) -> Result<FileOutcome, CliError> {
    let bundle = run_file(path, mode, run);
    let mut written = vec![with_suffix(stem, ".json")];
    write_atomic(&written[0], &bundle.to_json())?;
    if out.csv {
        for (suffix, text) in [(".coeffs.csv", coeffs_csv(&bundle)), (".eval.csv", eval_csv(&bundle))] {
            let target = with_suffix(stem, suffix);
            write_atomic(&target, &text)?;
            written.push(target);
        }
    }
    Ok(FileOutcome {
        input: path.to_path_buf(),
        report: format_report(&bundle),
        exit_code: exit_code(&bundle),
        bundle,
        written,
    })
}

/// Default stem: the input path without its extension.
pub fn default_stem(input: &Path) -> PathBuf {
    input.with_extension("")
}

/// `*.toml` files directly inside `dir`, sorted by name.
pub fn problem_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every problem in `dir` in parallel; results come back in file order.
/// Outputs go to `out.out` when given, else next to each input.
pub fn process_dir(
    dir: &Path,
    mode: ModeChoice,
    run: &RunOptions,
    out: &OutputOptions,
) -> Result<Vec<FileOutcome>, CliError> {
    let files = problem_files(dir)?;
    if let Some(target) = &out.out {
        fs::create_dir_all(target).map_err(|e| CliError::io(target, e))?;
    }
    files
        .par_iter()
        .map(|f| {
            let stem = match &out.out {
                Some(target) => target.join(f.file_stem().unwrap_or_default()),
                None => default_stem(f),
            };
            process_file(f, &stem, mode, run, out)
        })
        .collect()
}

/// Worst code over a batch: errors beat hypothesis failures beat success.
pub fn combined_exit_code(codes: impl IntoIterator<Item = i32>) -> i32 {
    codes
        .into_iter()
        .max_by_key(|&c| match c {
            0 => 0,
            2 => 1,
            _ => 2,
        })
        .unwrap_or(0)
}
