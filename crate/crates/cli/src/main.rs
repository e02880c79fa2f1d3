//! Command-line entry point for the latent WGAN-GP pipeline.
//!
//! Subcommands: `gen-data`, `train`, `sample`, `eval`, `compare`,
//! `gru-demo`. Configuration comes from a JSON file plus flag overrides
//! (flags win); every command re-run with the same configuration and seeds
//! produces the same outputs. Exit codes: 0 success, 1 validation error,
//! 2 runtime error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use qlgan::latent_data::DistributionSpec;

#[derive(Parser)]
#[command(name = "qlgan", version, about = "Latent WGAN-GP with quantum statevector generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON run configuration; omitted fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory override.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seed list override, comma separated.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
}

impl ConfigArgs {
    fn resolve(&self) -> qlgan::Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out_dir {
            config.out_dir = out.clone();
        }
        if let Some(seeds) = &self.seeds {
            config.seeds = seeds.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a latent target dataset and write it as CSV.
    GenData {
        #[command(flatten)]
        base: ConfigArgs,
        /// Output CSV path (default <out_dir>/data.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Distribution: uniform01 | standard-normal | shifted-log-normal | sin-three-peak.
        #[arg(long)]
        dist: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        /// Number of rows.
        #[arg(long)]
        n: Option<usize>,
        /// Seed of the synthetic sampler.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train one WGAN-GP per seed and write checkpoints plus histories.
    Train {
        #[command(flatten)]
        base: ConfigArgs,
        /// Latent CSV to train on (overrides the config's data source).
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        n_critic: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
    },
    /// Sample latent vectors from a generator checkpoint.
    Sample {
        /// Generator checkpoint file.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Rows to sample.
        #[arg(long)]
        n: usize,
        /// Finite measurement budget per expectation (quantum only).
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Run config carrying the quantum readout/scale settings; defaults
        /// to the config.json echoed next to the checkpoint directory.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Per-dimension Wasserstein distances, moments, and correlations.
    Eval {
        #[arg(long)]
        generated: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Z0 significance of test scenarios against a reference scenario.
    Compare {
        /// Reference scenario CSV (name,mean,std,direction).
        #[arg(long)]
        reference: PathBuf,
        /// Test scenario CSVs.
        #[arg(long, num_args = 1.., required = true)]
        tests: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run a seeded bidirectional GRU forward pass and print the state.
    GruDemo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        hidden: usize,
        #[arg(long, default_value_t = 4)]
        input_dim: usize,
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
}

fn parse_dist(name: &str) -> qlgan::Result<DistributionSpec> {
    match name {
        "uniform01" => Ok(DistributionSpec::Uniform01),
        "standard-normal" | "normal" => Ok(DistributionSpec::StandardNormal),
        "shifted-log-normal" | "log-normal" => Ok(DistributionSpec::shifted_log_normal_default()),
        "sin-three-peak" | "sin" => Ok(DistributionSpec::sin_three_peak_default()),
        other => Err(qlgan::Error::Argument(format!("unknown distribution {other:?}"))),
    }
}

fn run(cli: Cli) -> qlgan::Result<()> {
    match cli.command {
        Command::GenData { base, out, dist, dim, n, seed } => {
            let mut config = base.resolve()?;
            if let Some(d) = dist {
                config.data = Some(parse_dist(&d)?);
            }
            if let Some(d) = dim {
                config.dim = d;
            }
            if let Some(n) = n {
                config.n_samples = n;
            }
            if let Some(s) = seed {
                config.data_seed = s;
            }
            config.validate()?;
            commands::gen_data(&config, out)
        }
        Command::Train { base, dataset, epochs, batch_size, n_critic, learning_rate } => {
            let mut config = base.resolve()?;
            if let Some(d) = dataset {
                config.dataset = Some(d);
            }
            if let Some(e) = epochs {
                config.train.epochs = e;
            }
            if let Some(b) = batch_size {
                config.train.batch_size = b;
            }
            if let Some(k) = n_critic {
                config.train.n_critic = k;
            }
            if let Some(lr) = learning_rate {
                config.train.learning_rate = lr;
            }
            config.validate()?;
            commands::cmd_train(&config)
        }
        Command::Sample { checkpoint, n, shots, seed, out, config } => {
            let run_config = match config {
                Some(path) => Some(RunConfig::load(&path)?),
                None => None,
            };
            commands::sample(&checkpoint, n, shots, seed, &out, run_config.as_ref())
        }
        Command::Eval { generated, reference, out_dir } => {
            commands::eval(&generated, &reference, &out_dir)
        }
        Command::Compare { reference, tests, out_dir } => {
            commands::compare(&reference, &tests, &out_dir)
        }
        Command::GruDemo { seed, hidden, input_dim, steps } => {
            commands::gru_demo(seed, hidden, input_dim, steps)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version exit cleanly; usage problems are validation errors
            if e.exit_code() == 0 {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
