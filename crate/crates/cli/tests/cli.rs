use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use momentsys_cli::dto::{ColumnDto, ProblemFile, ResultBundle, SolutionDto, Status};
use serde_json::Value;

const CATALAN: &str = r#"
version = 1

[problem]
sequence = "catalan"
mu = [1.0, 0.0]
truncation = 20
A = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
B = [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
"#;

const RESONANT: &str = r#"
version = 1

[problem]
sequence = "factorial"
mu = [1.0, 0.0]
truncation = 10
A = [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]
B = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [3.0, 0.0]]]
"#;

const FACTORIAL_DIAG: &str = r#"
version = 1

[problem]
sequence = "factorial"
truncation = 8
A = [[[0.2, 0.0], [0.1, 0.0]], [[0.3, 0.0], [-0.1, 0.0]]]
B = [[[2.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [3.5, 0.0]]]
"#;

const Q_DIAG: &str = r#"
version = 1

[problem]
sequence = "qfactorial:q=2"
truncation = 20
A = [[[0.5, 0.0], [0.0, 0.0]], [[0.25, 0.0], [-0.5, 0.0]]]
B = [[[3.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [7.0, 0.0]]]
"#;

const CLASSICAL_COV: &str = r#"
version = 1

[problem]
sequence = "factorial"
mu = [2.0, 0.0]
lambda = [0.7, -0.2]
truncation = 20
A = [[[0.3, 0.0], [0.1, 0.0]], [[0.2, 0.0], [-0.4, 0.0]]]
B = [[[2.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [2.0, 0.0]]]
"#;

const CATALAN_JORDAN: &str = r#"
version = 1

[problem]
sequence = "catalan"
mu = [1.5, 0.0]
truncation = 12
A = [[[0.8, 0.0], [-0.4, 0.0]], [[1.0, 0.0], [-0.5, 0.0]]]
B = [[[1.6, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.6, 0.0]]]
"#;

const FACTORIAL_JORDAN: &str = r#"
version = 1

[problem]
sequence = "factorial"
mu = [2.0, 0.0]
truncation = 15
A = [[[0.3, 0.0], [-0.7, 0.0]], [[0.4, 0.0], [0.2, 0.0]]]
B = [[[2.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [2.0, 0.0]]]
"#;

struct Run {
    code: i32,
    stdout: String,
    json: Option<String>,
}

impl Run {
    fn bundle(&self) -> ResultBundle {
        ResultBundle::from_json(self.json.as_deref().expect("json written")).unwrap()
    }

    fn value(&self) -> Value {
        serde_json::from_str(self.json.as_deref().expect("json written")).unwrap()
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn momentsys(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_momentsys")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn run(cmd: &str, problem: &str, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "problem.toml", problem);
    let stem = dir.path().join("result");
    let mut args = vec![cmd, input.to_str().unwrap(), "--out", stem.to_str().unwrap()];
    args.extend_from_slice(extra);
    let (code, stdout) = momentsys(&args);
    Run {
        code,
        stdout,
        json: fs::read_to_string(dir.path().join("result.json")).ok(),
    }
}

fn coefficient(bundle: &ResultBundle, solution: usize, p: usize) -> Vec<[f64; 2]> {
    match &bundle.solutions[solution] {
        SolutionDto::Series { series, .. } => series.coeffs[p].clone(),
        other => panic!("expected a series, got {other:?}"),
    }
}

#[test]
fn catalan_example() {
    let r = run("solve", CATALAN, &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let v = r.value();
    assert_eq!(v["hypothesis_reports"][0]["h2"]["bound_C"].as_f64(), Some(2.0));
    let b = r.bundle();
    let s1 = coefficient(&b, 0, 1);
    assert!((s1[0][0] - 1.0).abs() < 1e-14 && s1[0][1].abs() < 1e-14);
    assert!(s1[1][0].abs() < 1e-14 && s1[1][1].abs() < 1e-14);
    assert!(b.residuals[0].unwrap() <= 1e-10);
}

#[test]
fn resonant_check_exits_two() {
    let r = run("check", RESONANT, &[]);
    assert_eq!(r.code, 2);
    let b = r.bundle();
    assert_eq!(b.status, Status::HypothesisFailure);
    let res = &b.hypothesis_reports[0].h1.resonances;
    assert_eq!(res.len(), 1);
    assert_eq!(res[0].p, 2);
    assert!(r.stdout.contains("resonances:"));
    assert!(r.stdout.lines().any(|l| l.trim_start().starts_with("2  3.00000000000e0")));
}

#[test]
fn zmb_of_diagonal_factorial() {
    let r = run("zmb", FACTORIAL_DIAG, &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let b = r.bundle();
    let SolutionDto::Symbolic { columns, display, residual, .. } = &b.solutions[0] else {
        panic!("expected a symbolic matrix");
    };
    assert_eq!(display, &vec![vec!["z^2".to_string(), "0".into()], vec!["0".into(), "z^3.5".into()]]);
    assert_eq!(*residual, Some(0.0));
    let mus: Vec<[f64; 2]> = columns
        .iter()
        .map(|c| match c {
            ColumnDto::Monomial { mu, .. } => *mu,
            other => panic!("expected monomial, got {other:?}"),
        })
        .collect();
    assert_eq!(mus, vec![[2.0, 0.0], [3.5, 0.0]]);
    assert_eq!(r.value()["solutions"][0]["columns"][0]["kind"], "monomial");
}

#[test]
fn planar_jordan_log_series() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "j.toml", FACTORIAL_JORDAN);
    let (code, stdout) = momentsys(&["planar", input.to_str().unwrap(), "--csv"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("log^1 s_0"));
    let b = ResultBundle::from_json(&fs::read_to_string(dir.path().join("j.json")).unwrap()).unwrap();
    assert_eq!(b.solutions.len(), 2);
    let SolutionDto::Series { series, residual, .. } = &b.solutions[1] else { panic!() };
    assert_eq!(series.log_terms.len(), 1);
    assert!(residual.unwrap() <= 1e-10);
    let csv = fs::read_to_string(dir.path().join("j.coeffs.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("1,log1,0,")));
    let eval = fs::read_to_string(dir.path().join("j.eval.csv")).unwrap();
    assert!(eval.lines().skip(1).all(|l| l.split(',').count() == 9), "{eval}");
}

#[test]
fn exit_codes_per_subcommand() {
    let cases: &[(&str, &str, i32)] = &[
        ("solve", CATALAN, 0),
        ("solve", RESONANT, 2),
        ("basis", FACTORIAL_DIAG, 0),
        ("zmb", FACTORIAL_DIAG, 0),
        ("zmb", RESONANT, 2),
        ("planar", FACTORIAL_DIAG, 0),
        ("planar", CATALAN_JORDAN, 0),
        ("planar", FACTORIAL_JORDAN, 0),
        ("planar", RESONANT, 2),
        ("check", CATALAN, 0),
        ("check", RESONANT, 2),
        ("verify", Q_DIAG, 0),
        ("verify", CATALAN, 1),
        ("cov", CLASSICAL_COV, 0),
        ("cov", CATALAN, 1),
    ];
    for (cmd, problem, expected) in cases {
        let r = run(cmd, problem, &[]);
        assert_eq!(r.code, *expected, "{cmd}:\n{}", r.stdout);
        let b = r.bundle();
        assert_eq!(b.residuals.len(), b.solutions.len());
        if *expected == 0 {
            assert!(b.residuals.iter().all(|x| x.is_some_and(|x| x <= 1e-10)), "{cmd}: {:?}", b.residuals);
        }
    }
}

#[test]
fn parse_errors_exit_one() {
    for bad in [
        "not toml [",
        "version = 2\n[problem]\nsequence = \"factorial\"\ntruncation = 3\nA = [[[0.0, 0.0]]]\nB = [[[1.0, 0.0]]]\n",
        "version = 1\n[problem]\nsequence = \"nope\"\ntruncation = 3\nA = [[[0.0, 0.0]]]\nB = [[[1.0, 0.0]]]\n",
        "version = 1\n[problem]\nsequence = \"factorial\"\ntruncation = 0\nA = [[[0.0, 0.0]]]\nB = [[[1.0, 0.0]]]\n",
        "version = 1\n[problem]\nsequence = \"factorial\"\ntruncation = 3\nA = [[[0.0, 0.0]]]\nB = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]\n",
    ] {
        let r = run("solve", bad, &[]);
        assert_eq!(r.code, 1, "{bad}");
        let b = r.bundle();
        assert_eq!(b.status, Status::Error);
        assert_eq!(b.error.unwrap().kind, "ParseError");
    }
    assert_eq!(momentsys(&["solve"]).0, 1);
    assert_eq!(momentsys(&["frobnicate", "x.toml"]).0, 1);
}

#[test]
fn empty_basis_reports_no_solutions() {
    let r = run("basis", FACTORIAL_DIAG, &["--region", "5,6,-1,1"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("no Floquet solutions found in region"));
    assert!(r.bundle().solutions.is_empty());
}

#[test]
fn flags_override_the_file() {
    let r = run("solve", CATALAN, &["--trunc", "7", "--pmax", "50"]);
    assert_eq!(r.code, 0);
    let b = r.bundle();
    match &b.solutions[0] {
        SolutionDto::Series { series, .. } => assert_eq!(series.coeffs.len(), 8),
        other => panic!("{other:?}"),
    }
    assert_eq!(b.hypothesis_reports[0].h1.checked_up_to, 50);
    // a tolerance below the achieved residual is a hard error
    assert_eq!(run("solve", CATALAN, &["--tol", "0"]).code, 1);
}

#[test]
fn json_is_deterministic() {
    let a = run("solve", Q_DIAG, &[]);
    let b = run("solve", Q_DIAG, &[]);
    assert_eq!(a.json.unwrap().as_bytes(), b.json.unwrap().as_bytes());
    let timed = run("solve", Q_DIAG, &["--timing"]);
    assert!(timed.bundle().timing.is_some());
}

#[test]
fn quiet_suppresses_the_report() {
    let r = run("solve", CATALAN, &["--quiet"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
}

#[test]
fn csv_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "cat.toml", CATALAN);
    let (code, _) = momentsys(&["solve", input.to_str().unwrap(), "--csv", "--quiet"]);
    assert_eq!(code, 0);
    let coeffs = fs::read_to_string(dir.path().join("cat.coeffs.csv")).unwrap();
    let mut lines = coeffs.lines();
    assert_eq!(lines.next(), Some("solution,part,p,re_0,im_0,re_1,im_1"));
    assert_eq!(lines.nth(1), Some("0,coeff,1,1e0,0e0,0e0,0e0"));
    assert_eq!(coeffs.lines().count(), 1 + 21);
    let eval = fs::read_to_string(dir.path().join("cat.eval.csv")).unwrap();
    assert!(eval.starts_with("solution,column,t,re_z,im_z,re_0,im_0,re_1,im_1\n"));
    assert_eq!(eval.lines().count(), 1 + 20);
    // no temporary files left behind
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["cat.coeffs.csv", "cat.eval.csv", "cat.json", "cat.toml"]);
}

#[test]
fn batch_runs_every_file_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in");
    fs::create_dir(&inputs).unwrap();
    write(&inputs, "b_resonant.toml", &RESONANT.replace("[problem]", "[problem]\nmode = \"check\""));
    write(&inputs, "a_catalan.toml", CATALAN);
    write(&inputs, "c_zmb.toml", &FACTORIAL_DIAG.replace("[problem]", "[problem]\nmode = \"zmb\""));
    write(&inputs, "notes.txt", "ignored");
    let out = dir.path().join("out");
    let (code, stdout) = momentsys(&["batch", inputs.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    let headers: Vec<&str> = stdout.lines().filter(|l| l.starts_with("== ")).collect();
    assert_eq!(headers.len(), 3);
    assert!(headers[0].ends_with("a_catalan.toml"));
    assert!(headers[1].ends_with("b_resonant.toml"));
    assert!(headers[2].ends_with("c_zmb.toml"));
    let mode = |name: &str| {
        let text = fs::read_to_string(out.join(name)).unwrap();
        ResultBundle::from_json(&text).unwrap().mode
    };
    use momentsys_cli::Mode;
    assert_eq!(mode("a_catalan.json"), Mode::Solve);
    assert_eq!(mode("b_resonant.json"), Mode::Check);
    assert_eq!(mode("c_zmb.json"), Mode::Zmb);

    // --mode only applies to files that name none
    let (code, _) = momentsys(&["batch", inputs.to_str().unwrap(), "--out", out.to_str().unwrap(), "--mode", "check", "--quiet"]);
    assert_eq!(code, 2);
    assert_eq!(mode("a_catalan.json"), Mode::Check);
    assert_eq!(mode("c_zmb.json"), Mode::Zmb);
}

#[test]
fn problem_file_round_trip() {
    for text in [CATALAN, RESONANT, CLASSICAL_COV, Q_DIAG] {
        let file = ProblemFile::parse(text).unwrap();
        let again = ProblemFile::parse(&file.to_toml().unwrap()).unwrap();
        assert_eq!(file, again);
    }
}

#[test]
fn result_bundle_round_trip() {
    for (cmd, problem) in [("solve", CATALAN), ("check", RESONANT), ("zmb", FACTORIAL_DIAG), ("cov", CLASSICAL_COV), ("planar", CATALAN_JORDAN)] {
        let r = run(cmd, problem, &[]);
        let text = r.json.clone().unwrap();
        let bundle = ResultBundle::from_json(&text).unwrap();
        assert_eq!(bundle.to_json(), text, "{cmd}");
    }
}
