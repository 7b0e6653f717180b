//! The `fraclap` command line: weights, operator application, solves and
//! benchmark suites.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 solver
//! non-convergence, 4 any other failure.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bench::{
    self, coexistence_problem, default_gaussian_extent, exact_ex522_pair, exact_poisson_pair, operator_case,
    run_suite, solver_problem, OperatorExample, SolverExample, SuiteOutput, SuiteParams,
};
use crate::error::{FracLapError, Result};
use crate::grid::{norm_l2, norm_linf, try_sample, write_csv, GridFunction, GridSpec};
use crate::io::write_atomic;
use crate::operator::{apply_fft, build_operator};
use crate::solver::{solve_with, EllipticProblem, SolveOptions, SolveReport};
use crate::weights::build_table_cached;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_FAILURE: i32 = 4;

pub const CACHE_ENV: &str = "FRACLAP_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "fraclap", version, about = "Spectral fractional Laplacian: weights, operators, solvers, benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the weights ω(√m) for every squared lag m up to max_lag².
    Weights(WeightsArgs),
    /// Apply the discrete operator to a benchmark function.
    Apply(ApplyArgs),
    /// Solve a benchmark elliptic problem.
    Solve(SolveArgs),
    /// Run a named benchmark suite.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    Ex1,
    Ex2,
    Ex3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// 1D fractional Poisson with the exact solution `C x (1 - x²)_+^s`.
    Poisson,
    /// 2D `(-Δ)^{α/2} u + u = f` with Gaussian solution and exterior data.
    Gaussian2d,
    /// 2D mixture `λ₁ (-Δ)^{α/2} + (1 - λ₁)(-Δ)^{α₂/2}`.
    Coexist,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long, value_parser = parse_num)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value = "1", value_parser = parse_num)]
    pub h: f64,
    #[arg(long, default_value_t = 8)]
    pub max_lag: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long, value_enum)]
    pub example: Example,
    #[arg(long, value_parser = parse_num)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_num)]
    pub h: f64,
    #[arg(long, value_parser = parse_num)]
    pub s: Option<f64>,
    #[arg(long, value_parser = parse_num)]
    pub a: Option<f64>,
    /// Sampling half-width for ex1.
    #[arg(long, value_parser = parse_num)]
    pub extent: Option<f64>,
    /// Write the result grid function (CSV + JSON spec sidecar) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    #[arg(long, value_parser = parse_num)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_num)]
    pub h: f64,
    #[arg(long, value_parser = parse_num)]
    pub s: Option<f64>,
    #[arg(long, value_parser = parse_num)]
    pub a: Option<f64>,
    #[arg(long, value_parser = parse_num)]
    pub lambda1: Option<f64>,
    #[arg(long, value_parser = parse_num)]
    pub alpha2: Option<f64>,
    /// Box Ω as `lo,hi[,lo,hi...]` (gaussian2d and coexist).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_num)]
    pub domain: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_num)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Exterior truncation half-width L (gaussian2d).
    #[arg(long, value_parser = parse_num)]
    pub extent: Option<f64>,
    /// Report JSON path; the solution goes next to it as `<stem>.solution.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub suite: String,
    #[arg(long, value_delimiter = ',', value_parser = parse_num)]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_num)]
    pub hs: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_num)]
    pub s: Option<f64>,
    #[arg(long, value_parser = parse_num)]
    pub a: Option<f64>,
    #[arg(long, value_parser = parse_num)]
    pub ref_h: Option<f64>,
    #[arg(long, value_parser = parse_num)]
    pub extent: Option<f64>,
    /// λ₁ values for the coexist suite.
    #[arg(long, value_delimiter = ',', value_parser = parse_num)]
    pub lambda1: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_num)]
    pub alpha2: Option<f64>,
    #[arg(long, value_parser = parse_num)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write one two-column `h error` file per curve into this directory.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

/// Accepts plain floats and fractions such as `1/64`.
fn parse_num(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let d: f64 = d.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            n / d
        }
        None => s.trim().parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(FracLapError::Config(msg.into()))
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 {
        Ok(())
    } else {
        config(format!("h must be positive, got {h}"))
    }
}

fn check_solve_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        config(format!("alpha must lie in (0, 2], got {alpha}"))
    }
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Exit code for a library error.
pub fn exit_code(e: &FracLapError) -> i32 {
    match e {
        FracLapError::Config(_) | FracLapError::Parse { .. } | FracLapError::SpecMismatch(_) => EXIT_CONFIG,
        FracLapError::NotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_FAILURE,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            log::info!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    log::info!("effective configuration: {cmd:?}; {CACHE_ENV}={:?}", cache_dir());
    match cmd {
        Command::Weights(a) => cmd_weights(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

pub fn cmd_weights(args: &WeightsArgs) -> Result<i32> {
    if !(0.0..=2.0).contains(&args.alpha) {
        return config(format!("alpha must lie in [0, 2], got {}", args.alpha));
    }
    if !(1..=3).contains(&args.dim) {
        return config(format!("dim must be 1, 2 or 3, got {}", args.dim));
    }
    check_h(args.h)?;
    let n = args.max_lag as usize + 1;
    let table = build_table_cached(args.alpha, args.h, args.dim, &vec![n; args.dim], cache_dir().as_deref())?;
    let limit = args.max_lag * args.max_lag;
    let rows: Vec<(u64, f64)> = table.iter().filter(|&(m, _)| m <= limit).collect();
    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("alpha,d,h,sq_lag,omega\n");
            for (m, w) in &rows {
                s.push_str(&format!("{:.16e},{},{:.16e},{m},{w:.16e}\n", args.alpha, args.dim, args.h));
            }
            s
        }
        Format::Json => {
            let v: Vec<Value> = rows.iter().map(|(m, w)| json!({ "sq_lag": m, "omega": w })).collect();
            let doc = json!({ "alpha": args.alpha, "d": args.dim, "h": args.h, "weights": v });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

pub fn cmd_apply(args: &ApplyArgs) -> Result<i32> {
    if !(0.0..=2.0).contains(&args.alpha) {
        return config(format!("alpha must lie in [0, 2], got {}", args.alpha));
    }
    check_h(args.h)?;
    let example = match args.example {
        Example::Ex1 => OperatorExample::Ex1 { extent: args.extent.unwrap_or(12.0) },
        Example::Ex2 => OperatorExample::Ex2 { s: args.s.unwrap_or(4.0), a: args.a.unwrap_or(1.0) },
        Example::Ex3 => OperatorExample::Ex3 { s: args.s.unwrap_or(4.0), ref_h: args.h },
    };
    log::info!("apply: {example:?}, alpha = {}, h = {}", args.alpha, args.h);
    let (u, exact) = operator_case(&example, args.alpha, args.h)?;
    let v = apply_fft(&build_operator(args.alpha, &u.spec)?, &u)?;
    let mut summary = json!({ "example": example.name(), "alpha": args.alpha, "h": args.h, "points": v.len() });
    let diffs: Vec<f64> = exact.iter().zip(&v.data).filter_map(|(e, got)| e.map(|e| e - got)).collect();
    if !diffs.is_empty() {
        let spec = GridSpec::new(args.h, vec![diffs.len()], vec![0.0])?;
        let e = GridFunction::from_vec(spec, diffs)?;
        summary["linf_error"] = json!(norm_linf(&e));
        summary["l2_error"] = json!(norm_l2(&e));
    }
    if let Some(path) = &args.out {
        write_csv(&v, path)?;
        log::info!("wrote {}", path.display());
    }
    println!("{}", serde_json::to_string(&summary)?);
    Ok(EXIT_OK)
}

fn box_domain(flat: &[f64], dim: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if flat.len() != 2 * dim {
        return config(format!("--domain needs {} numbers (lo,hi per axis), got {}", 2 * dim, flat.len()));
    }
    Ok(flat.chunks(2).map(|c| (c[0], c[1])).unzip())
}

/// The problem to solve plus its exact solution, when known.
type Exact = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

fn build_problem(args: &SolveArgs) -> Result<(EllipticProblem, Option<Exact>)> {
    check_solve_alpha(args.alpha)?;
    check_h(args.h)?;
    let alpha = args.alpha;
    match args.problem {
        Problem::Poisson => {
            if let Some(d) = &args.domain {
                if box_domain(d, 1)? != (vec![-1.0], vec![1.0]) {
                    return config("the poisson problem is posed on (-1, 1)");
                }
            }
            let s = args.s.unwrap_or(alpha / 2.0);
            if !(s > 0.0) {
                return config(format!("s must be positive, got {s}"));
            }
            let p = solver_problem(&SolverExample::Poisson { s: Some(s) }, alpha, args.h)?;
            Ok((p, Some(Arc::new(move |x: &[f64]| Ok(exact_poisson_pair(alpha, s, x[0])?.0)))))
        }
        Problem::Gaussian2d => {
            let a = args.a.unwrap_or(6.0);
            if !(a > 0.0) {
                return config(format!("a must be positive, got {a}"));
            }
            let mut p = solver_problem(&SolverExample::Gaussian2d { a }, alpha, args.h)?;
            if let Some(d) = &args.domain {
                let (lo, hi) = box_domain(d, 2)?;
                p.domain = GridSpec::interior(&lo, &hi, args.h)?;
            }
            let reach = p.box_bounds().iter().map(|&(l, h)| l.abs().max(h.abs())).fold(0.0, f64::max);
            if let Some(ext) = p.exterior.as_mut() {
                ext.extent = args.extent.unwrap_or_else(|| default_gaussian_extent(a, reach));
            }
            Ok((p, Some(Arc::new(move |x: &[f64]| Ok(exact_ex522_pair(alpha, a, x)?.0)))))
        }
        Problem::Coexist => {
            let lambda1 = args.lambda1.unwrap_or(0.5);
            let alpha2 = args.alpha2.unwrap_or(2.0);
            check_solve_alpha(alpha2)?;
            let mut p = coexistence_problem(lambda1, alpha, alpha2, args.h)?;
            if let Some(d) = &args.domain {
                let (lo, hi) = box_domain(d, 2)?;
                p.domain = GridSpec::interior(&lo, &hi, args.h)?;
            }
            Ok((p, None))
        }
    }
}

fn solution_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    report.with_file_name(format!("{stem}.solution.csv"))
}

fn report_json(report: &SolveReport, exact: Option<&Exact>) -> Result<String> {
    let mut v: Value = serde_json::from_str(&report.to_json()?)?;
    if let Some(exact) = exact {
        let u = try_sample(|x| exact(x), &report.solution.spec)?;
        let e = u.sub(&report.solution)?;
        v["error"] = json!({ "linf": norm_linf(&e), "l2": norm_l2(&e) });
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    let (problem, exact) = build_problem(args)?;
    problem.validate()?;
    let opts = SolveOptions { tol: args.tol, max_iter: args.max_iter, cache_dir: cache_dir() };
    log::info!(
        "solve: {:?}, terms = {:?}, reaction = {}, extents = {:?}, tol = {:?}, max_iter = {:?}, exterior = {:?}",
        args.problem,
        problem.terms,
        problem.reaction,
        problem.domain.extents,
        opts.tol,
        opts.max_iter,
        problem.exterior
    );
    let report = solve_with(&problem, &opts)?;
    let text = report_json(&report, exact.as_ref())?;
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.out {
        let sol = solution_path(path);
        write_csv(&report.solution, &sol)?;
        log::info!("wrote {}", sol.display());
    }
    if report.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "error: solver did not converge: relative residual {:.3e} after {} iterations",
            report.relative_residual, report.iterations
        );
        Ok(EXIT_NOT_CONVERGED)
    }
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32> {
    if !bench::SUITES.contains(&args.suite.as_str()) {
        return config(format!("unknown suite '{}' (expected one of {:?})", args.suite, bench::SUITES));
    }
    let params = SuiteParams {
        alphas: args.alphas.clone(),
        hs: args.hs.clone(),
        s: args.s,
        a: args.a,
        ref_h: args.ref_h,
        extent: args.extent,
        lambdas: args.lambda1.clone(),
        alpha2: args.alpha2,
        solve: SolveOptions { tol: args.tol, max_iter: None, cache_dir: cache_dir() },
    };
    log::info!("bench {}: {params:?}", args.suite);
    let out = run_suite(&args.suite, &params)?;
    let text = match args.format {
        Format::Csv => out.to_csv(),
        Format::Json => out.to_json()? + "\n",
    };
    emit(args.out.as_deref(), &text)?;
    if let (Some(dir), SuiteOutput::Convergence(reports)) = (&args.plot_dir, &out) {
        for r in reports {
            let tags: String = r.params.iter().map(|(k, v)| format!("_{k}{v}")).collect();
            let path = dir.join(format!("{}_alpha{}{tags}_{}.dat", r.example, r.alpha, r.norm.name()));
            write_atomic(&path, r.plot_data().as_bytes())?;
        }
        log::info!("wrote {} plot files to {}", reports.len(), dir.display());
    }
    if !out.all_converged() {
        eprintln!("error: at least one solve in suite '{}' did not converge", args.suite);
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}
