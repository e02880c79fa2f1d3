//! Run configuration: one JSON file describing the generator, the training
//! hyperparameters, the data source, the seed list, and the output
//! directory. Command-line flags override individual fields; the resolved
//! configuration is echoed verbatim into the output directory so any run
//! can be reproduced from its echo.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qlgan::ansatz::GeneratorConfig;
use qlgan::latent_data::DistributionSpec;
use qlgan::wgan::TrainConfig;
use qlgan::{Error, Result, RNG_ALGORITHM};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Quantum circuit shape; required for quantum generator kinds.
    pub generator: Option<GeneratorConfig>,
    pub train: TrainConfig,
    /// Synthetic target distribution, used when `dataset` is absent.
    pub data: Option<DistributionSpec>,
    /// Path to a latent CSV; takes precedence over `data`.
    pub dataset: Option<PathBuf>,
    /// Latent dimension of synthetic data.
    pub dim: usize,
    /// Row count of synthetic data and of sampling commands.
    pub n_samples: usize,
    /// Seed used to synthesize the target dataset (shared by all runs).
    pub data_seed: u64,
    /// One training run per seed.
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Name of the random number generator algorithm; pinned for provenance.
    pub rng: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            generator: None,
            train: TrainConfig::default(),
            data: Some(DistributionSpec::StandardNormal),
            dataset: None,
            dim: 10,
            n_samples: 10_000,
            data_seed: 0,
            seeds: vec![1, 2, 3, 4, 5],
            out_dir: PathBuf::from("qlgan-run"),
            rng: RNG_ALGORITHM.to_string(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if let Some(g) = &self.generator {
            g.validate()?;
        }
        if let Some(d) = &self.data {
            d.validate()?;
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list must not be empty".into()));
        }
        if self.rng != RNG_ALGORITHM {
            return Err(Error::Config(format!(
                "unsupported rng {:?}; this build provides {:?}",
                self.rng, RNG_ALGORITHM
            )));
        }
        Ok(())
    }

    /// Write the resolved configuration next to the run outputs.
    pub fn echo(&self, out_dir: &Path) -> Result<()> {
        std::fs::create_dir_all(out_dir)?;
        let text = serde_json::to_string_pretty(self).expect("config serializes");
        std::fs::write(out_dir.join("config.json"), text + "\n")?;
        Ok(())
    }
}
