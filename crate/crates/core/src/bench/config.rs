use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aggregate::{ApproachKind, FitConfig};
use crate::error::{Error, Result};
use crate::ingest::{resolve_path, DatasetConfig};
use crate::weights::DominanceConfig;

fn all_approaches() -> Vec<ApproachKind> {
    ApproachKind::ALL.to_vec()
}

fn default_cap() -> usize {
    20_000
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_max_iterations() -> usize {
    50_000
}

/// Benchmark configuration, usually read from a TOML file with one
/// `[[dataset]]` table per dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    #[serde(rename = "dataset", alias = "datasets")]
    pub datasets: Vec<DatasetConfig>,
    #[serde(default = "all_approaches")]
    pub approaches: Vec<ApproachKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub dominance_cap: usize,
    #[serde(default)]
    pub exact_dominance: bool,
    /// Worker threads for dataset-level parallelism; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_tolerance")]
    pub solver_tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub solver_max_iterations: usize,
    /// Family left out of the secondary summary columns.
    #[serde(default)]
    pub exclude_family: Option<String>,
}

impl BenchmarkConfig {
    pub fn new(datasets: Vec<DatasetConfig>) -> Self {
        Self {
            datasets,
            approaches: all_approaches(),
            seed: 0,
            dominance_cap: default_cap(),
            exact_dominance: false,
            workers: 0,
            output_dir: default_output_dir(),
            solver_tolerance: default_tolerance(),
            solver_max_iterations: default_max_iterations(),
            exclude_family: None,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Reads a TOML config; relative dataset paths and `output_dir` are taken
    /// relative to the config file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut cfg.datasets {
            d.path = resolve_path(base, &d.path);
        }
        cfg.output_dir = resolve_path(base, &cfg.output_dir);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::InvalidConfig("no datasets configured".into()));
        }
        if self.approaches.is_empty() {
            return Err(Error::InvalidConfig("no approaches configured".into()));
        }
        let mut ids: Vec<String> = self.datasets.iter().map(DatasetConfig::dataset_id).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(format!("duplicate dataset id '{}'", w[0])));
        }
        if !(self.solver_tolerance > 0.0) || self.solver_max_iterations == 0 {
            return Err(Error::InvalidConfig("solver tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }

    /// Fit settings for one dataset; the subsampling seed depends only on the
    /// global seed and the dataset id.
    pub fn fit_config(&self, dataset_id: &str) -> FitConfig {
        FitConfig {
            dominance: DominanceConfig {
                cap: (!self.exact_dominance).then_some(self.dominance_cap),
                seed: self.seed ^ fnv1a(dataset_id.as_bytes()),
            },
            solver_tolerance: self.solver_tolerance,
            solver_max_iterations: self.solver_max_iterations,
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}
