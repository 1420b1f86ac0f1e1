//! `mw`: runs one experiment suite and writes its report.
//!
//! Exit status: 0 when every assertion passes, 1 when one fails, 2 for
//! unreadable or invalid input, 3 when an instance exceeds a size cap.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use matroid_walks::experiment::{self, ExperimentConfig, Format, Instance, Suite};
use matroid_walks::negdep::BooleanDistribution;
use matroid_walks::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "mw", version, about = "Experiment suites for walks on weighted matroid complexes")]
struct Args {
    /// Matroid descriptor JSON (one object or an array); defaults to the bundled catalog.
    #[arg(long, value_name = "PATH")]
    matroid: Option<PathBuf>,
    /// Extra distribution JSON for the slc and scp suites.
    #[arg(long, value_name = "PATH")]
    distribution: Option<PathBuf>,
    /// axioms, walks, constants, contraction, mixing, concentration, slc, scp or theta-scan.
    #[arg(long)]
    suite: String,
    /// Required by constants, contraction and theta-scan.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    /// Descent iterations per restart.
    #[arg(long, default_value_t = 200)]
    budget: usize,
    /// Random functions or distributions per instance and level.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("MW_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("MW_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn load_distribution(path: &Path) -> Result<(String, BooleanDistribution), Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let id = path.file_stem().map_or_else(|| "distribution".to_string(), |s| s.to_string_lossy().into_owned());
    Ok((id, BooleanDistribution::from_json(&text)?))
}

fn execute(args: &Args) -> Result<i32, Error> {
    configure_threads()?;
    let suite: Suite = args.suite.parse()?;
    let cfg = ExperimentConfig {
        suite,
        seed: args.seed,
        restarts: args.restarts,
        budget: args.budget,
        epsilon: args.eps,
        tol: args.tol,
        trials: args.trials,
    };
    cfg.validate()?;
    let instances: Vec<Instance> = match &args.matroid {
        Some(path) => experiment::load_instances(path)?,
        None => experiment::bundled(),
    };
    let distributions = match &args.distribution {
        Some(path) => vec![load_distribution(path)?],
        None => Vec::new(),
    };
    let report = experiment::run(&cfg, &instances, &distributions)?;
    let format = match args.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let text = report.render(format);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(experiment::exit_code(&report))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mw: {e}");
            experiment::error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
