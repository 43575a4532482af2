//! `submax`: generate Gaussian matrices, run the submatrix searches, sweep
//! seeded trials and evaluate the overlap-gap quantities.
//!
//! JSON goes to stdout, diagnostics to stderr. Exit status is 0 on success,
//! 1 on a flag or domain error and 2 when a verification suite fails.

mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use submax::algorithms::{brute_force, run_greedy, run_igp, run_las, Algorithm};
use submax::experiments::{run_trials, TrialConfig};
use submax::matrix::{ave, is_local_max, MatrixDescriptor};
use submax::theory::{
    critical_alphas, f_overlap, overlap_exponent_numeric, projection_gap, region_components, region_grid, theta_n, Axis,
};
use submax::{Error, GaussianMatrix, MatrixView, SeededGaussian, Selection};

#[derive(Parser, Debug)]
#[command(name = "submax", version, about = "Large-average submatrix search in Gaussian random matrices")]
struct Cli {
    /// Worker threads for trial-level parallelism (output does not depend on it)
    #[arg(long, global = true, env = "SUBMAX_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded standard Gaussian matrix
    Gen(GenArgs),
    /// Run one search on a generated or loaded matrix
    Run(RunArgs),
    /// Run seeded trials and summarize them
    Sweep(SweepArgs),
    /// Sample the region {f >= 0} on a grid over [0,1]^2
    OgpRegion(RegionArgs),
    /// Critical value levels of the overlap function
    OgpCritical,
    /// Numeric growth exponent of overlapping pairs next to its closed form
    OgpExponent(ExponentArgs),
    /// Run a built-in verification suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Number of columns, defaults to n
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Write the CSV here and print the descriptor instead
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print only the regeneration descriptor
    #[arg(long, conflicts_with = "out")]
    descriptor: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    alg: Algorithm,
    /// Matrix side; optional with --input
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    /// Matrix seed; required unless --input is given
    #[arg(long)]
    seed: Option<u64>,
    /// Greedy threshold, defaults to theta_n
    #[arg(long)]
    theta: Option<f64>,
    /// Square matrix as headerless CSV
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    alg: Algorithm,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    theta: Option<f64>,
    /// Per-trial CSV output
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RegionArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 800)]
    res: usize,
    /// Grid CSV; the summary is also written next to it with a .json extension
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExponentArgs {
    #[arg(long)]
    n: f64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    y1: f64,
    #[arg(long)]
    y2: f64,
    #[arg(long, default_value_t = 0.02)]
    delta: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: verify::Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => dispatch(cli.command),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verify) => ExitCode::from(2),
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::OgpRegion(a) => ogp_region(a),
        Command::OgpCritical => print_json(&critical_alphas()?),
        Command::OgpExponent(a) => ogp_exponent(a),
        Command::Verify(a) => {
            let report = verify::run_suite(a.suite, a.seed)?;
            print_json(&report)?;
            if report.passed {
                Ok(())
            } else {
                eprintln!("verification suite {} failed", report.suite);
                Err(Failure::Verify)
            }
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let descriptor = MatrixDescriptor { n: a.n, m: a.m.unwrap_or(a.n), seed: a.seed };
    if a.descriptor {
        // still validates the shape
        SeededGaussian::new(descriptor.n, descriptor.m, descriptor.seed)?;
        return print_json(&descriptor);
    }
    let matrix = descriptor.regenerate()?;
    match a.out {
        Some(path) => {
            let mut w = create(&path)?;
            matrix.write_csv(&mut w)?;
            w.flush()?;
            print_json(&descriptor)
        }
        None => {
            let mut out = io::stdout().lock();
            matrix.write_csv(&mut out)?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RunOutput {
    alg: Algorithm,
    n: usize,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    rows: Vec<usize>,
    cols: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ave: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_las: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    local_max: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    step_sums: Option<Vec<f64>>,
}

fn run(a: RunArgs) -> Result<(), Failure> {
    if a.theta.is_some() && a.alg != Algorithm::Greedy {
        return Err(Failure::Usage("--theta only applies to --alg greedy".into()));
    }
    match &a.input {
        Some(path) => {
            let file = File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let matrix = GaussianMatrix::read_csv(io::BufReader::new(file))?;
            let n = matrix.n_rows();
            if matrix.n_cols() != n {
                return Err(Failure::Usage(format!("input must be square, got {n}x{}", matrix.n_cols())));
            }
            if let Some(given) = a.n {
                if given != n {
                    return Err(Failure::Usage(format!("--n {given} does not match the {n}x{n} input")));
                }
            }
            print_json(&run_on(&matrix, &a, a.seed)?)
        }
        None => {
            let (Some(n), Some(seed)) = (a.n, a.seed) else {
                return Err(Failure::Usage("--n and --seed are required without --input".into()));
            };
            let matrix = SeededGaussian::square(n, seed)?;
            print_json(&run_on(&matrix, &a, Some(seed))?)
        }
    }
}

fn run_on<M: MatrixView>(matrix: &M, a: &RunArgs, seed: Option<u64>) -> Result<RunOutput, Failure> {
    let n = matrix.n_rows();
    let k = a.k;
    if k == 0 || k > n {
        return Err(Failure::Usage(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let mut out = RunOutput {
        alg: a.alg,
        n,
        k,
        seed,
        rows: Vec::new(),
        cols: Vec::new(),
        ave: None,
        t_las: None,
        local_max: None,
        m: None,
        theta: None,
        step_sums: None,
    };
    let selection = match a.alg {
        Algorithm::Las => {
            let r = run_las(matrix, k, None)?;
            out.t_las = Some(r.t_las);
            out.local_max = Some(is_local_max(matrix, &r.selection)?);
            r.selection
        }
        Algorithm::Igp => {
            let r = run_igp(matrix, k)?;
            out.step_sums = Some(r.step_sums);
            r.selection
        }
        Algorithm::Brute => brute_force(matrix, k)?.0,
        Algorithm::Greedy => {
            let theta = match a.theta {
                Some(t) => t,
                None => theta_n(n as f64, k)?,
            };
            let r = run_greedy(matrix, theta)?;
            out.m = Some(r.m);
            out.theta = Some(theta);
            if r.m < k {
                eprintln!("greedy clique side {} is below k = {k}", r.m);
                r.selection
            } else {
                Selection::new(r.selection.rows()[..k].to_vec(), r.selection.cols()[..k].to_vec())?
            }
        }
    };
    if !selection.rows().is_empty() {
        out.ave = Some(ave(matrix, &selection)?);
    }
    out.rows = selection.rows().to_vec();
    out.cols = selection.cols().to_vec();
    Ok(out)
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let mut cfg = TrialConfig::new(a.alg, a.n, a.k, a.trials, a.seed);
    cfg.theta_override = a.theta;
    let stats = run_trials(&cfg)?;
    if stats.failures > 0 {
        eprintln!("{} of {} trials failed", stats.failures, a.trials);
    }
    if let Some(path) = &a.csv {
        let mut w = create(path)?;
        stats.write_csv(&mut w)?;
        w.flush()?;
    }
    print_json(&stats)
}

#[derive(Serialize)]
struct RegionSummary {
    alpha: f64,
    resolution: usize,
    components: usize,
    gap_y1: Option<(f64, f64)>,
    gap_y2: Option<(f64, f64)>,
}

fn ogp_region(a: RegionArgs) -> Result<(), Failure> {
    let grid = region_grid(a.alpha, a.res)?;
    let summary = RegionSummary {
        alpha: a.alpha,
        resolution: a.res,
        components: region_components(&grid),
        gap_y1: projection_gap(&grid, Axis::Y1),
        gap_y2: projection_gap(&grid, Axis::Y2),
    };
    if let Some(path) = &a.out {
        let mut w = create(path)?;
        writeln!(w, "y1,y2,f,inside")?;
        let r = a.res as f64;
        for ((i, j), f) in grid.f_values.indexed_iter() {
            let y1 = (i as f64 + 0.5) / r;
            let y2 = (j as f64 + 0.5) / r;
            writeln!(w, "{y1:?},{y2:?},{f:?},{}", u8::from(grid.mask[[i, j]]))?;
        }
        w.flush()?;
        let mut side = create(&path.with_extension("json"))?;
        serde_json::to_writer(&mut side, &summary).map_err(Error::from)?;
        writeln!(side)?;
        side.flush()?;
    }
    print_json(&summary)
}

#[derive(Serialize)]
struct ExponentOutput {
    n: f64,
    k: usize,
    alpha: f64,
    y1: f64,
    y2: f64,
    delta: f64,
    exponent: f64,
    f: f64,
}

fn ogp_exponent(a: ExponentArgs) -> Result<(), Failure> {
    let f = f_overlap(a.alpha, a.y1, a.y2)?;
    let exponent = overlap_exponent_numeric(a.n, a.k, a.alpha, a.y1, a.y2, a.delta)?;
    print_json(&ExponentOutput { n: a.n, k: a.k, alpha: a.alpha, y1: a.y1, y2: a.y2, delta: a.delta, exponent, f })
}
