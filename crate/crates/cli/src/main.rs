use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prcs_cli::{Overrides, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(
    name = "prcs",
    version,
    about = "Single-photon state reconstruction from phase-randomized coherent states"
)]
struct Cli {
    #[command(subcommand)]
    stage: Stage,
}

#[derive(Subcommand)]
enum Stage {
    /// Generate homodyne record files for every simulated channel
    Simulate(Opts),
    /// Histogram and calibrate every channel against the vacuum
    Calibrate(Opts),
    /// Fit mean photon numbers to the calibrated histograms
    FitMu(Opts),
    /// Estimate the single-photon marginal with error bars
    Estimate(Opts),
    /// Reconstruct Wigner function and density matrix
    Reconstruct(Opts),
    /// Write the report, summary and plot data
    Report(Opts),
    /// Run every stage in order
    Run(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use exact marginals instead of sampled data
    #[arg(long)]
    theoretical: bool,
    /// Nonzero mean photon numbers, comma-separated; replaces configured channels
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    mu: Option<Vec<f64>>,
    /// Records per channel
    #[arg(long)]
    records: Option<usize>,
    /// Samples per record
    #[arg(long)]
    samples: Option<usize>,
    /// Histogram bins
    #[arg(long)]
    bins: Option<usize>,
    /// Electronic noise standard deviation, in quadrature units
    #[arg(long)]
    noise: Option<f64>,
}

impl Opts {
    fn load(&self) -> Result<PipelineConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        cfg.apply(&Overrides {
            out: self.out.clone(),
            seed: self.seed,
            theoretical: self.theoretical,
            mu: self.mu.clone(),
            records: self.records,
            samples: self.samples,
            bins: self.bins,
            noise: self.noise,
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

type StageFn = fn(&PipelineConfig) -> Result<(), PipelineError>;

fn execute(stage: Stage) -> Result<(), PipelineError> {
    let (opts, f): (Opts, StageFn) = match stage {
        Stage::Simulate(o) => (o, |c| prcs_cli::simulate(c).map(drop)),
        Stage::Calibrate(o) => (o, |c| prcs_cli::calibrate(c).map(drop)),
        Stage::FitMu(o) => (o, |c| prcs_cli::fit_mu(c).map(drop)),
        Stage::Estimate(o) => (o, |c| prcs_cli::estimate(c).map(drop)),
        Stage::Reconstruct(o) => (o, |c| prcs_cli::reconstruct(c).map(drop)),
        Stage::Report(o) => (o, |c| {
            prcs_cli::report(c)?;
            print!(
                "{}",
                std::fs::read_to_string(prcs_cli::Layout::new(&c.out).report()).unwrap_or_default()
            );
            Ok(())
        }),
        Stage::Run(o) => (o, |c| {
            prcs_cli::run(c)?;
            print!(
                "{}",
                std::fs::read_to_string(prcs_cli::Layout::new(&c.out).report()).unwrap_or_default()
            );
            Ok(())
        }),
    };
    f(&opts.load()?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.stage) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
