//! Command-line front end. `run` returns the process exit code: 0 on success,
//! 1 when a verification suite reports a failed check, 2 on malformed input.

pub mod sweep;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::json;

use crate::chain::{Boundary, ChainSpec};
use crate::error::{Error, Result};
use crate::groundspace::degeneracy;
use crate::numerics::ComplexMatrix;
use crate::rank_class::{classify_rank2, classify_rank3, validate_projector, ProjectorMode};
use crate::spectral::{convergents, spectral_gap, spectral_gap_with, GapMethod};
use crate::states::{classify_phase, TwoQubitState, CLASSIFY_TOL};
use crate::verify::{run_suite, Suite, SuiteConfig};

use sweep::{write_sweep, Family, Grid, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ffchain", version, about = "Gapped and gapless phases of frustration-free qubit chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Open,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    DeflatedIterative,
}

#[derive(clap::Args, Debug)]
struct ChainArgs {
    /// State literal as JSON, or @path to a file holding one
    #[arg(long, conflicts_with = "spec")]
    state: Option<String>,
    /// ChainSpec JSON file
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Phase verdict for a two-qubit state
    Classify {
        /// State literal as JSON, or @path
        state: String,
    },
    /// Spectral gap of a chain
    Gap {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Ground-space dimension and the branch that produced it
    Degeneracy {
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Phase-diagram sweep over a real family
    Sweep {
        #[arg(long, value_enum, default_value = "real-plus")]
        family: Family,
        /// min:max:steps
        #[arg(long, default_value = "0.02:0.5:25")]
        p: String,
        /// min:max:steps
        #[arg(long, default_value = "0:1.5707963267948966:25")]
        dtheta: String,
        #[arg(long, value_delimiter = ',', default_value = "6,8")]
        n: Vec<usize>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        /// Defaults to $FFCHAIN_WORKERS, then to the number of cores
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write periodic-degeneracy curve grids, one file per n
        #[arg(long)]
        curves: bool,
    },
    /// Run a seeded verification suite
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chain lengths as min:max
        #[arg(long)]
        n: Option<String>,
        /// name=value tolerance override; `tol=` applies to all checks
        #[arg(long = "tol")]
        tolerances: Vec<String>,
        /// Report path (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a rank-2 or rank-3 projector given as a 4x4 JSON matrix
    RankClassify {
        file: PathBuf,
        /// Accept any Hermitian matrix and use the projector onto its range
        #[arg(long)]
        reduce: bool,
    },
    /// Continued-fraction convergents of theta
    Convergents {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

enum Outcome {
    Done,
    ChecksFailed,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::ChecksFailed) => EXIT_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn read_arg(text: &str) -> Result<String> {
    match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

fn parse_state(text: &str) -> Result<TwoQubitState> {
    serde_json::from_str(&read_arg(text)?).map_err(|e| Error::Input(format!("state literal: {e}")))
}

fn chain_spec(args: &ChainArgs) -> Result<ChainSpec> {
    let mut spec = match (&args.state, &args.spec) {
        (Some(s), None) => {
            let n = args.n.ok_or_else(|| Error::Input("--n is required with --state".into()))?;
            ChainSpec::open(parse_state(s)?, n)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            ChainSpec::from_json(&text)?
        }
        _ => return Err(Error::Input("give exactly one of --state or --spec".into())),
    };
    if let Some(n) = args.n {
        spec = spec.with_n(n);
    }
    if let Some(b) = args.boundary {
        spec.boundary = b.into();
    }
    spec.validate()?;
    Ok(spec)
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Input(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Input(e.to_string()))
}

/// Range `a:b` (or a single value).
fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Input(format!("range '{s}' is not min:max"));
    let (a, b) = s.split_once(':').unwrap_or((s, s));
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_tolerances(items: &[String]) -> Result<BTreeMap<String, f64>> {
    items
        .iter()
        .map(|item| {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Input(format!("tolerance '{item}' is not name=value")))?;
            let v: f64 = v.parse().map_err(|_| Error::Input(format!("tolerance '{item}' has no number")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

/// 4×4 matrix as JSON rows of numbers or [re, im] pairs.
fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let raw: Vec<Vec<serde_json::Value>> =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("matrix: {e}")))?;
    let entry = |v: &serde_json::Value| -> Result<C64> {
        match v {
            serde_json::Value::Number(x) => Ok(C64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
            serde_json::Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
                (Some(re), Some(im)) => Ok(C64::new(re, im)),
                _ => Err(Error::Input(format!("bad matrix entry {v}"))),
            },
            _ => Err(Error::Input(format!("bad matrix entry {v}"))),
        }
    };
    let rows: Vec<Vec<C64>> = raw.iter().map(|r| r.iter().map(entry).collect()).collect::<Result<_>>()?;
    ComplexMatrix::from_rows(&rows)
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match cmd {
        Command::Classify { state } => {
            let psi = parse_state(&state)?;
            print_json(out, &classify_phase(&psi, CLASSIFY_TOL))?;
        }
        Command::Gap { chain, method } => {
            let spec = chain_spec(&chain)?;
            let r = match method {
                MethodArg::Auto => spectral_gap(&spec)?,
                MethodArg::Dense => spectral_gap_with(&spec, GapMethod::Dense)?,
                MethodArg::DeflatedIterative => spectral_gap_with(&spec, GapMethod::DeflatedIterative)?,
            };
            print_json(out, &r)?;
        }
        Command::Degeneracy { chain } => {
            let spec = chain_spec(&chain)?;
            let (d, branch) = degeneracy(&spec)?;
            print_json(out, &json!({ "n": spec.n, "boundary": spec.boundary, "degeneracy": d, "branch": branch }))?;
        }
        Command::Sweep { family, p, dtheta, n, out: path, workers, seed, curves } => {
            let cfg = SweepConfig {
                family,
                p_grid: p.parse::<Grid>()?,
                dtheta_grid: dtheta.parse::<Grid>()?,
                n_list: n,
                seed,
                curves,
                out: path,
                workers,
            };
            let start = Instant::now();
            let manifest = write_sweep(&cfg)?;
            let _ = writeln!(
                err,
                "{} rows in {:.2}s, manifest {}",
                manifest.rows,
                start.elapsed().as_secs_f64(),
                cfg.manifest_path().display()
            );
            if manifest.spot_checks.iter().any(|s| !s.pass) {
                let _ = writeln!(err, "curve spot check failed");
                return Ok(Outcome::ChecksFailed);
            }
        }
        Command::Verify { suite, trials, seed, n, tolerances, out: path } => {
            let suite: Suite = suite.parse()?;
            let mut cfg = SuiteConfig::new(suite, trials, seed);
            if let Some(r) = n {
                let (lo, hi) = parse_range(&r)?;
                cfg = cfg.with_range(lo, hi);
            }
            cfg.tolerances = parse_tolerances(&tolerances)?;
            let report = run_suite(&cfg)?;
            match path {
                Some(p) => {
                    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Input(e.to_string()))?;
                    fs::write(&p, text + "\n").map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
                }
                None => print_json(out, &report)?,
            }
            let _ = writeln!(err, "{}: {} passed, {} failed", suite.name(), report.passed, report.failed);
            for c in report.failures().take(10) {
                let _ = writeln!(err, "  FAIL {} n={} value={:e} bound={:e} seed={:?}", c.name, c.n, c.value, c.bound, c.seed);
            }
            if !report.all_pass {
                return Ok(Outcome::ChecksFailed);
            }
        }
        Command::RankClassify { file, reduce } => {
            let text = fs::read_to_string(&file).map_err(|e| Error::Input(format!("{}: {e}", file.display())))?;
            let mode = if reduce { ProjectorMode::Reduce } else { ProjectorMode::Strict };
            let spec = validate_projector(&parse_matrix(&text)?, mode)?;
            match spec.rank {
                2 => print_json(out, &json!({ "rank": 2, "verdict": classify_rank2(&spec)? }))?,
                3 => print_json(out, &json!({ "rank": 3, "verdict": classify_rank3(&spec)? }))?,
                r => return Err(Error::WrongRank { expected: 2, got: r }),
            }
        }
        Command::Convergents { theta, count } => {
            let seq: Vec<_> = convergents(theta, count)
                .into_iter()
                .map(|c| json!({ "p": c.p, "q": c.q, "value": c.value, "dirichlet": c.satisfies_dirichlet(theta) }))
                .collect();
            print_json(out, &json!({ "theta": theta, "convergents": seq }))?;
        }
    }
    Ok(Outcome::Done)
}
