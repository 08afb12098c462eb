//! Command-line surface: argument parsing, job count, exit codes.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::runner::{self, write_json};
use crate::selftest;

#[derive(Debug, Parser)]
#[command(name = "dcmlab", version, about = "Random walks and rankings on directed configuration model graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Base seed; overrides `seeds.base`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `out` (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; `DCMLAB_JOBS` takes precedence.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, clap::Args)]
struct SelftestArgs {
    /// Accepted for a uniform interface; unused.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Writes `selftest.json` here when given.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample sequences and graphs; write them as text files.
    Generate(RunArgs),
    /// Stationary distribution and the pi_max sandwich.
    Stationary(RunArgs),
    /// Worst-start TV distance at multiples of the entropic time.
    #[command(name = "mix-profile")]
    MixProfile(RunArgs),
    /// PageRank vector and its bounds.
    Pagerank(RunArgs),
    /// Wasserstein distance between n pi and the limit law.
    #[command(name = "bulk-w1")]
    BulkW1(RunArgs),
    /// Power-law band checks for rankings.
    Tails(RunArgs),
    /// Heavy-vertex skeleton and its size.
    Skeleton(RunArgs),
    /// Maximum-value tables and histograms over many samples.
    #[command(name = "figure-sim")]
    FigureSim(RunArgs),
    /// Check degree sequences against the moment assumption.
    Validate(RunArgs),
    /// Run the exact-invariant suite.
    Selftest(SelftestArgs),
}

/// `DCMLAB_JOBS` wins over `--jobs`; zero or garbage is a config error.
pub fn resolve_jobs(flag: Option<usize>, env: Option<String>) -> CliResult<Option<usize>> {
    let jobs = match env {
        Some(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::config("DCMLAB_JOBS", format!("`{v}` is not a positive integer")))?,
        ),
        None => flag,
    };
    if jobs == Some(0) {
        return Err(CliError::config("--jobs", "must be >= 1"));
    }
    Ok(jobs)
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn run_experiment(kind: Kind, args: RunArgs) -> CliResult<()> {
    let jobs = resolve_jobs(args.jobs, std::env::var("DCMLAB_JOBS").ok())?;
    let mut cfg = Config::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seeds.base = s;
    }
    let out = args
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let cfg = cfg.resolve(kind)?;
    let outcome = with_pool(jobs, || runner::execute(kind, &cfg, &out))??;
    if let Some(c) = &outcome.check {
        println!("{} {}/{} runs passed", if c.pass { "PASS" } else { "FAIL" }, c.passing, c.total);
    }
    println!("summary: {}", outcome.summary.display());
    outcome.into_result().map(|_| ())
}

fn run_selftest(args: SelftestArgs) -> CliResult<()> {
    let jobs = resolve_jobs(args.jobs, std::env::var("DCMLAB_JOBS").ok())?;
    let results = with_pool(jobs, selftest::run)?;
    for r in &results {
        match &r.detail {
            Some(d) => println!("FAIL {}: {d}", r.name),
            None => println!("PASS {}", r.name),
        }
    }
    if let Some(out) = args.out {
        std::fs::create_dir_all(&out)?;
        write_json(
            &out.join("selftest.json"),
            &json!({ "tool": "dcmlab", "version": runner::VERSION, "checks": results }),
        )?;
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::Check(format!("{failed} of {} checks failed", results.len())));
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => run_experiment(Kind::Generate, a),
        Command::Stationary(a) => run_experiment(Kind::Stationary, a),
        Command::MixProfile(a) => run_experiment(Kind::MixProfile, a),
        Command::Pagerank(a) => run_experiment(Kind::Pagerank, a),
        Command::BulkW1(a) => run_experiment(Kind::BulkW1, a),
        Command::Tails(a) => run_experiment(Kind::Tails, a),
        Command::Skeleton(a) => run_experiment(Kind::Skeleton, a),
        Command::FigureSim(a) => run_experiment(Kind::FigureSim, a),
        Command::Validate(a) => run_experiment(Kind::Validate, a),
        Command::Selftest(a) => run_selftest(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
