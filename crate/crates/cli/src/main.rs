use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use momentsys::moments::Region;
use momentsys_cli::output::{
    combined_exit_code, default_stem, process_dir, process_file, ModeChoice, OutputOptions,
};
use momentsys_cli::{Mode, RunOptions};

#[derive(Parser)]
#[command(name = "momentsys", version, about = "Floquet solutions of moment differential systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Output stem (file mode) or directory (batch mode).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Resonance and growth scan limit.
    #[arg(long, global = true)]
    pmax: Option<usize>,
    /// Series truncation order.
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Exponent search box `re_min,re_max,im_min,im_max`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    region: Option<Vec<f64>>,
    /// Also write coefficient and evaluation CSV files.
    #[arg(long, global = true)]
    csv: bool,
    /// Suppress the report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    /// Record wall-clock time in the bundle.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Floquet solutions at the given or every admissible exponent.
    Solve { file: PathBuf },
    /// Independent Floquet solutions in the search region.
    Basis { file: PathBuf },
    /// Generalized matrix power for `B`.
    Zmb { file: PathBuf },
    /// Closed forms for 2x2 systems.
    Planar { file: PathBuf },
    /// Hypothesis reports only.
    Check { file: PathBuf },
    /// Compare Jackson and moment derivatives for a q-factorial problem.
    Verify { file: PathBuf },
    /// Solve through the change of variable at `lambda`.
    Cov { file: PathBuf },
    /// Every `*.toml` in a directory, in parallel.
    Batch {
        dir: PathBuf,
        /// Mode for files that do not name one.
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown mode '{s}'"))
}

fn run_options(flags: &Flags) -> anyhow::Result<RunOptions> {
    let region = match flags.region.as_deref() {
        Some(&[r0, r1, i0, i1]) => Some(Region::new(r0, r1, i0, i1).context("invalid --region")?),
        Some(_) => anyhow::bail!("--region needs four numbers"),
        None => None,
    };
    Ok(RunOptions {
        p_max: flags.pmax,
        truncation: flags.trunc,
        tol: flags.tol,
        region,
        timing: flags.timing,
    })
}

fn file_stem(input: &Path, out: Option<&PathBuf>) -> PathBuf {
    match out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => p.with_extension(""),
        Some(p) => p.clone(),
        None => default_stem(input),
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let opts = run_options(&cli.flags)?;
    let out = OutputOptions {
        out: cli.flags.out.clone(),
        csv: cli.flags.csv,
        quiet: cli.flags.quiet,
    };
    let (file, mode) = match cli.command {
        Command::Solve { file } => (file, Mode::Solve),
        Command::Basis { file } => (file, Mode::Basis),
        Command::Zmb { file } => (file, Mode::Zmb),
        Command::Planar { file } => (file, Mode::Planar),
        Command::Check { file } => (file, Mode::Check),
        Command::Verify { file } => (file, Mode::VerifyJackson),
        Command::Cov { file } => (file, Mode::ChangeOfVariable),
        Command::Batch { dir, mode } => {
            let outcomes = process_dir(&dir, ModeChoice::Fallback(mode.unwrap_or(Mode::Solve)), &opts, &out)?;
            for o in &outcomes {
                if !out.quiet {
                    println!("== {}", o.input.display());
                    print!("{}", o.report);
                }
            }
            return Ok(combined_exit_code(outcomes.iter().map(|o| o.exit_code)));
        }
    };
    let stem = file_stem(&file, out.out.as_ref());
    let outcome = process_file(&file, &stem, ModeChoice::Forced(mode), &opts, &out)?;
    if !out.quiet {
        print!("{}", outcome.report);
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    // usage errors exit 1; code 2 is reserved for hypothesis failures
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
