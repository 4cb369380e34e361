use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use randprox::config::{Algorithm, ExperimentConfig};
use randprox::harness::{format_real, trace_to_string, Experiment, MetricsRecord, RNG_ALGORITHM};
use randprox::Error;
use rayon::prelude::*;

mod plot;

#[derive(Parser)]
#[command(
    name = "randprox",
    version,
    about = "Randomized asynchronous ADMM experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured experiment and write its trace.
    Run(RunArgs),
    /// Check a config file and its cover without running anything.
    Validate(ValidateArgs),
    /// Run several algorithms over several seeds and summarize medians.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Also write plot.svg.
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated: sync-admm, async-admm, dgd-gossip.
    #[arg(long, value_delimiter = ',', required = true)]
    algorithms: Vec<Algorithm>,
    /// Number of seeds, counting up from the config's seed.
    #[arg(long)]
    seeds: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write plot.svg of the medians.
    #[arg(long)]
    plot: bool,
}

/// Exit 1: the input is wrong. Exit 2: a valid input failed while running.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

type Outcome<T> = Result<T, Failure>;

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn runtime_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Validate(args) => validate(args),
        Command::Compare(args) => compare(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Outcome<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))
        .map_err(config_err)?;
    ExperimentConfig::from_json(&text).map_err(config_err)
}

fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| anyhow!("{} is not a file path", path.display()))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))
}

fn create_dir(dir: &Path) -> Outcome<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(runtime_err)
}

fn run(args: RunArgs) -> Outcome<()> {
    let config = load(&args.config)?;
    let experiment = Experiment::from_config(&config).map_err(config_err)?;
    let rows = experiment.run().map_err(runtime_err)?;
    create_dir(&args.out)?;

    let csv = trace_to_string(&rows);
    write_atomic(&args.out.join("trace.csv"), csv.as_bytes()).map_err(runtime_err)?;
    let meta = serde_json::json!({
        "rng": RNG_ALGORITHM,
        "algorithm": config.algorithm,
        "seed": config.seed,
        "minimizer": experiment.minimizer(),
        "rows": rows.len(),
        "config": config,
    });
    let meta = serde_json::to_string_pretty(&meta).map_err(runtime_err)? + "\n";
    write_atomic(&args.out.join("run.json"), meta.as_bytes()).map_err(runtime_err)?;
    if args.plot {
        let svg = plot::render(&csv).map_err(runtime_err)?;
        write_atomic(&args.out.join("plot.svg"), svg.as_bytes()).map_err(runtime_err)?;
    }

    let last = rows.last().expect("a trace starts with k = 0");
    println!(
        "{} seed {}: k = {}, primal_updates = {}, squared_error = {}",
        last.algorithm,
        last.seed,
        last.k,
        last.primal_updates,
        format_real(last.squared_error)
    );
    Ok(())
}

fn validate(args: ValidateArgs) -> Outcome<()> {
    let config = load(&args.config)?;
    match Experiment::from_config(&config) {
        Ok(experiment) => {
            println!("ok");
            let problem = experiment.problem();
            for &l in &problem.cover_report().disconnected_components {
                let labels: Vec<String> = problem
                    .cover()
                    .component(l)
                    .iter()
                    .map(|&v| problem.graph().label(v).to_string())
                    .collect();
                println!(
                    "warning: component {{{}}} induces a disconnected subgraph",
                    labels.join(",")
                );
            }
            Ok(())
        }
        // Cover clause failures print as the bare verdict.
        Err(Error::ConfigInvalid { path, message }) if path == "cover" => {
            println!("{message}");
            Err(config_err(anyhow!("cover rejected")))
        }
        Err(e) => {
            println!("{e}");
            Err(config_err(e))
        }
    }
}

struct Job {
    algorithm: Algorithm,
    seed: u64,
    experiment: Experiment,
}

fn compare(args: CompareArgs) -> Outcome<()> {
    let config = load(&args.config)?;
    if args.seeds == 0 {
        return Err(config_err(anyhow!("--seeds must be at least 1")));
    }
    let mut algorithms = Vec::new();
    for &a in &args.algorithms {
        if algorithms.contains(&a) {
            return Err(config_err(anyhow!("algorithm {a} listed twice")));
        }
        algorithms.push(a);
    }
    let threads = thread_cap().map_err(config_err)?;

    let mut jobs = Vec::new();
    for &algorithm in &algorithms {
        for i in 0..args.seeds {
            let seed = config.seed.wrapping_add(i);
            let job_config = ExperimentConfig {
                algorithm,
                seed,
                ..config.clone()
            };
            let experiment = Experiment::from_config(&job_config)
                .with_context(|| format!("{algorithm}"))
                .map_err(config_err)?;
            jobs.push(Job {
                algorithm,
                seed,
                experiment,
            });
        }
    }
    create_dir(&args.out)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(runtime_err)?;
    let out = &args.out;
    let traces: Vec<Vec<MetricsRecord>> = pool
        .install(|| {
            jobs.par_iter()
                .map(|job| -> anyhow::Result<Vec<MetricsRecord>> {
                    let rows = job
                        .experiment
                        .run()
                        .with_context(|| format!("{} seed {}", job.algorithm, job.seed))?;
                    let path = out.join(format!("{}-seed-{}.csv", job.algorithm, job.seed));
                    write_atomic(&path, trace_to_string(&rows).as_bytes())?;
                    Ok(rows)
                })
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .map_err(runtime_err)?;

    let mut summary = String::from(plot::SUMMARY_HEADER);
    summary.push('\n');
    for &algorithm in &algorithms {
        let runs: Vec<&[MetricsRecord]> = jobs
            .iter()
            .zip(&traces)
            .filter(|(job, _)| job.algorithm == algorithm)
            .map(|(_, rows)| rows.as_slice())
            .collect();
        for (updates, median) in median_curve(&runs) {
            summary.push_str(&format!("{algorithm},{updates},{}\n", format_real(median)));
        }
    }
    write_atomic(&out.join("summary.csv"), summary.as_bytes()).map_err(runtime_err)?;
    let meta = serde_json::json!({
        "rng": RNG_ALGORITHM,
        "algorithms": algorithms,
        "seeds": (0..args.seeds).map(|i| config.seed.wrapping_add(i)).collect::<Vec<_>>(),
        "config": config,
    });
    let meta = serde_json::to_string_pretty(&meta).map_err(runtime_err)? + "\n";
    write_atomic(&out.join("run.json"), meta.as_bytes()).map_err(runtime_err)?;
    if args.plot {
        let svg = plot::render(&summary).map_err(runtime_err)?;
        write_atomic(&out.join("plot.svg"), svg.as_bytes()).map_err(runtime_err)?;
    }
    println!("{} runs written to {}", jobs.len(), out.display());
    Ok(())
}

/// `RANDPROX_THREADS`, or 0 for rayon's default.
fn thread_cap() -> anyhow::Result<usize> {
    match std::env::var("RANDPROX_THREADS") {
        Err(_) => Ok(0),
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => bail!("RANDPROX_THREADS must be a positive integer, got `{text}`"),
        },
    }
}

/// Median squared error across runs on the primal-update grid of the first
/// run. A run contributes its last recorded value at or before each grid point.
fn median_curve(runs: &[&[MetricsRecord]]) -> Vec<(u64, f64)> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    first
        .iter()
        .map(|row| {
            let p = row.primal_updates;
            let mut values: Vec<f64> = runs
                .iter()
                .map(|rows| {
                    let i = rows.partition_point(|r| r.primal_updates <= p);
                    rows[i.saturating_sub(1)].squared_error
                })
                .collect();
            (p, median(&mut values))
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
