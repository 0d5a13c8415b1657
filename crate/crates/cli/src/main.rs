//! `eja`: spectral decompositions, commutation queries and the verification
//! suites from the command line.
//!
//! Exit codes: 0 success or passing report, 1 failing report, 2 usage or
//! parse error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eja_core::harness::{run_example, ExampleId, PhiHypothesis};
use eja_core::{
    commutator_norm, operator_commute, run_suite, spectral_decompose, strongly_operator_commute, trace_inequality_gap,
    Algebra, Element, Parallelism, SuiteConfig, SuiteId, VerificationReport,
};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "eja", version, about = "Euclidean Jordan algebra spectral tools and commutation checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral decomposition of one element.
    Decompose(ElementArgs),
    /// Operator and strong commutation of two elements (coordinates of `a`
    /// then `b`).
    Commute(CommuteArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
    /// Reproduce a worked example (4.1 or 4.2).
    Example(ExampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Output {
    /// Output format; defaults to json for reports and text for queries.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ElementArgs {
    /// Algebra descriptor, e.g. `sym:3`, `spin:4`, `prod(sym:1,sym:2)`.
    #[arg(long)]
    algebra: Option<String>,
    /// JSON file with `coords` (and optionally `algebra`).
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
    /// Canonical coordinates.
    #[arg(last = true, allow_negative_numbers = true)]
    coords: Vec<f64>,
}

#[derive(Args, Debug)]
struct CommuteArgs {
    #[arg(long)]
    algebra: Option<String>,
    /// JSON file with `a`, `b` (and optionally `algebra`).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = eja_core::commute::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    out: Output,
    #[arg(last = true, allow_negative_numbers = true)]
    coords: Vec<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of thm31a, thm31b, cor32, cor33, thm34.
    suite: String,
    #[arg(long)]
    algebra: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, env = "EJA_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = eja_core::commute::DEFAULT_TOL)]
    tol: f64,
    /// Omit timing fields so repeated runs are byte-identical.
    #[arg(long)]
    deterministic: bool,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
    /// Points sampled per normal-cone or subgradient certificate.
    #[arg(long, default_value_t = 64)]
    cert_budget: usize,
    /// Invariance assumed for the added term in thm34.
    #[arg(long, default_value = "spectral")]
    phi: String,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct ExampleArgs {
    /// 4.1 or 4.2.
    id: String,
    /// Accepted for symmetry with `verify`; examples carry no timing.
    #[arg(long)]
    deterministic: bool,
    #[command(flatten)]
    out: Output,
}

/// Usage, parse and I/O errors; all map to exit code 2.
#[derive(Debug)]
struct Failure(String);

type CliResult<T> = Result<T, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure(e.to_string())
}

#[derive(Deserialize)]
struct ElementFile {
    algebra: Option<String>,
    coords: Vec<f64>,
}

#[derive(Deserialize)]
struct PairFile {
    algebra: Option<String>,
    a: Vec<f64>,
    b: Vec<f64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid JSON in {}: {e}", path.display())))
}

fn resolve_algebra(flag: Option<&str>, file: Option<&str>) -> CliResult<Algebra> {
    let s = flag.or(file).ok_or_else(|| usage("--algebra is required"))?;
    s.parse().map_err(usage)
}

fn element(alg: &Algebra, coords: Vec<f64>) -> CliResult<Element> {
    Element::new(alg.clone(), coords).map_err(usage)
}

/// Prints floats without representation noise such as `3.9999999999999996`.
fn num(v: f64) -> String {
    let r = (v * 1e10).round() / 1e10;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

fn nums(vs: &[f64]) -> String {
    format!("[{}]", vs.iter().map(|v| num(*v)).collect::<Vec<_>>().join(", "))
}

fn emit(out: &Output, default: Format, json: impl FnOnce() -> String, text: impl FnOnce() -> String) -> CliResult<()> {
    let mut body = match out.format.unwrap_or(default) {
        Format::Json => json(),
        Format::Text => text(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &out.output {
        Some(path) => fs::write(path, body).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(usage),
    }
}

#[derive(Serialize)]
struct DecomposeOut {
    algebra: String,
    eigenvalues: Vec<f64>,
    frame: Vec<Vec<f64>>,
}

fn cmd_decompose(args: ElementArgs) -> CliResult<bool> {
    let (alg, coords) = match &args.input {
        Some(path) => {
            let f: ElementFile = read_json(path)?;
            (resolve_algebra(args.algebra.as_deref(), f.algebra.as_deref())?, f.coords)
        }
        None => (resolve_algebra(args.algebra.as_deref(), None)?, args.coords),
    };
    let x = element(&alg, coords)?;
    let dec = spectral_decompose(&x);
    let out = DecomposeOut {
        algebra: alg.to_string(),
        eigenvalues: dec.eigenvalues.clone(),
        frame: dec.frame.iter().map(|f| f.as_slice().to_vec()).collect(),
    };
    emit(
        &args.out,
        Format::Text,
        || serde_json::to_string_pretty(&out).expect("finite values"),
        || {
            let mut s = format!("eigenvalues: {}\nframe:\n", nums(&out.eigenvalues));
            for f in &out.frame {
                s.push_str(&format!("  {}\n", nums(f)));
            }
            s
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct CommuteOut {
    algebra: String,
    commutator_norm: f64,
    operator: bool,
    strong: bool,
    gap: f64,
    tol: f64,
}

fn cmd_commute(args: CommuteArgs) -> CliResult<bool> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(usage("--tol must be positive"));
    }
    let (alg, a, b) = match &args.input {
        Some(path) => {
            let f: PairFile = read_json(path)?;
            (resolve_algebra(args.algebra.as_deref(), f.algebra.as_deref())?, f.a, f.b)
        }
        None => {
            let alg = resolve_algebra(args.algebra.as_deref(), None)?;
            let n = alg.dim();
            if args.coords.len() != 2 * n {
                return Err(usage(format!("expected {} coordinates (a then b), got {}", 2 * n, args.coords.len())));
            }
            let (a, b) = args.coords.split_at(n);
            (alg, a.to_vec(), b.to_vec())
        }
    };
    let a = element(&alg, a)?;
    let b = element(&alg, b)?;
    let out = CommuteOut {
        algebra: alg.to_string(),
        commutator_norm: commutator_norm(&a, &b).map_err(usage)?,
        operator: operator_commute(&a, &b, args.tol),
        strong: strongly_operator_commute(&a, &b, args.tol),
        gap: trace_inequality_gap(&a, &b).map_err(usage)?,
        tol: args.tol,
    };
    emit(
        &args.out,
        Format::Text,
        || serde_json::to_string_pretty(&out).expect("finite values"),
        || {
            format!(
                "operator: {}, strong: {}, gap: {}\ncommutator norm: {:e}\n",
                out.operator,
                out.strong,
                num(out.gap),
                out.commutator_norm
            )
        },
    )?;
    Ok(true)
}

fn emit_report(out: &Output, report: &VerificationReport) -> CliResult<bool> {
    emit(out, Format::Json, || report.to_json(), || report.to_text())?;
    Ok(report.pass)
}

fn cmd_verify(args: VerifyArgs) -> CliResult<bool> {
    let suite: SuiteId = args.suite.parse().map_err(usage)?;
    let alg: Algebra = args.algebra.parse().map_err(usage)?;
    if args.jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    let mut cfg = SuiteConfig::new(alg, args.trials, args.seed);
    cfg.tol = args.tol;
    cfg.cert_budget = args.cert_budget.max(1);
    cfg.phi = args.phi.parse::<PhiHypothesis>().map_err(usage)?;
    cfg.parallelism = Parallelism::with_jobs(args.jobs);
    cfg.validate().map_err(usage)?;
    let mut report = run_suite(suite, &cfg).map_err(usage)?;
    if args.deterministic {
        report.elapsed_ms = None;
    }
    emit_report(&args.out, &report)
}

fn cmd_example(args: ExampleArgs) -> CliResult<bool> {
    let id: ExampleId = args.id.parse().map_err(usage)?;
    let report = run_example(id);
    emit_report(&args.out, &report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Decompose(a) => cmd_decompose(a),
        Command::Commute(a) => cmd_commute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Example(a) => cmd_example(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
