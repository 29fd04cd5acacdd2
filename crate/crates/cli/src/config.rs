//! Declarative experiment configuration: one JSON document per experiment,
//! fully validated before any run, and echoed into every output for
//! provenance.

use gossip_core::engine::{NoiseModel, StepSchedule};
use gossip_core::netgraph::{
    erdos_renyi_model, read_dense_csv, read_edge_list, ErdosRenyiMeta, NonnegativeMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid {field}: {msg}")]
    Field { field: &'static str, msg: String },
    #[error("network error: {0}")]
    Net(#[from] gossip_core::netgraph::NetError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub network: NetworkSpec,
    #[serde(default)]
    pub x0: InitSpec,
    pub schedule: StepSchedule,
    #[serde(default)]
    pub activation: ActivationSpec,
    #[serde(default = "default_noise")]
    pub noise: NoiseModel,
    pub horizon: u64,
    #[serde(default = "default_record_every")]
    pub record_every: u64,
    #[serde(default)]
    pub seeds: SeedSpec,
}

fn default_noise() -> NoiseModel {
    NoiseModel::None
}

fn default_record_every() -> u64 {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub id: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSpec {
    /// No network (sample-stream schemes).
    #[default]
    None,
    Inline { rows: Vec<Vec<f64>> },
    /// Plain-text `i j weight` lines, 1-based indices.
    EdgeList { path: PathBuf },
    DenseCsv { path: PathBuf },
    ErdosRenyi { d: usize, p_edge: f64, seed: u64 },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    #[default]
    Ones,
    Inline { values: Vec<f64> },
    /// I.i.d. uniform on [lo, hi), drawn once from `seed` and shared by
    /// every run seed so all traces target the same reference values.
    Uniform { lo: f64, hi: f64, seed: u64 },
    /// Uniform on [0.5, 1.5): interior of the positive orthant.
    UniformPositive { seed: u64 },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActivationSpec {
    #[default]
    Synchronous,
    Bernoulli { rates: Vec<f64> },
    PeriodicRandom { mean_intervals: Vec<f64> },
    /// Mean inter-update time `base + slope * (i + 1)` for node `i`.
    PeriodicRandomLinear { base: f64, slope: f64 },
    SingleWeighted { weights: Vec<f64> },
    /// Updates driven by the CSMA/CA chain over the network's directed
    /// support links (node-exclusive conflicts), with multipliers learned
    /// over `learn_blocks` blocks of linearly growing duration.
    Csma {
        learn_blocks: u64,
        #[serde(default = "default_csma_alpha")]
        alpha: StepSchedule,
        #[serde(default)]
        clamp_zeta: bool,
    },
}

fn default_csma_alpha() -> StepSchedule {
    StepSchedule::Harmonic { c: 0.05 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedSpec {
    List { values: Vec<u64> },
    Count {
        n: u64,
        #[serde(default)]
        base: u64,
    },
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Count { n: 1, base: 0 }
    }
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::List { values } => values.clone(),
            SeedSpec::Count { n, base } => (*base..base + n).collect(),
        }
    }
}

/// Everything resolved from a config that is shared across run seeds.
pub struct PreparedExperiment {
    pub network: Option<NonnegativeMatrix>,
    pub network_meta: Option<ErdosRenyiMeta>,
    pub x0: Vec<f64>,
    pub seeds: Vec<u64>,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let file = File::open(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    let config: ExperimentConfig = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| ConfigError::Parse(e.to_string()))?;
    Ok(config)
}

impl ExperimentConfig {
    /// Validate and resolve the static parts (network, x0, seed list).
    /// `base_dir` anchors relative file paths.
    pub fn prepare(&self, base_dir: &Path) -> Result<PreparedExperiment, ConfigError> {
        self.schedule
            .validate()
            .map_err(|e| ConfigError::Field { field: "schedule", msg: e.to_string() })?;
        self.noise
            .validate()
            .map_err(|e| ConfigError::Field { field: "noise", msg: e.to_string() })?;
        if self.horizon == 0 {
            return Err(ConfigError::Field { field: "horizon", msg: "must be at least 1".into() });
        }
        if self.record_every == 0 {
            return Err(ConfigError::Field {
                field: "record_every",
                msg: "must be at least 1".into(),
            });
        }
        let seeds = self.seeds.seeds();
        if seeds.is_empty() {
            return Err(ConfigError::Field { field: "seeds", msg: "at least one seed".into() });
        }

        let (network, network_meta) = self.load_network(base_dir)?;
        let dim = match &network {
            Some(net) => net.dim(),
            None => default_dim_from_params(&self.algorithm.params),
        };
        let x0 = self.x0.generate(dim)?;
        Ok(PreparedExperiment { network, network_meta, x0, seeds })
    }

    fn load_network(
        &self,
        base_dir: &Path,
    ) -> Result<(Option<NonnegativeMatrix>, Option<ErdosRenyiMeta>), ConfigError> {
        match &self.network {
            NetworkSpec::None => Ok((None, None)),
            NetworkSpec::Inline { rows } => Ok((Some(NonnegativeMatrix::from_rows(rows)?), None)),
            NetworkSpec::EdgeList { path } => {
                let full = base_dir.join(path);
                let file =
                    File::open(&full).map_err(|source| ConfigError::Io { path: full, source })?;
                let m = read_edge_list(BufReader::new(file))?;
                Ok((Some(NonnegativeMatrix::from_matrix(m)?), None))
            }
            NetworkSpec::DenseCsv { path } => {
                let full = base_dir.join(path);
                let file =
                    File::open(&full).map_err(|source| ConfigError::Io { path: full, source })?;
                let m = read_dense_csv(BufReader::new(file))?;
                Ok((Some(NonnegativeMatrix::from_matrix(m)?), None))
            }
            NetworkSpec::ErdosRenyi { d, p_edge, seed } => {
                let (_, p, meta) = erdos_renyi_model(*d, *p_edge, *seed)?;
                let net = NonnegativeMatrix::from_matrix(p.matrix().clone())?;
                Ok((Some(net), Some(meta)))
            }
        }
    }
}

/// Sample-stream schemes carry their own dimension in the params.
fn default_dim_from_params(params: &serde_json::Value) -> usize {
    params.get("dim").and_then(|v| v.as_u64()).unwrap_or(20) as usize
}

impl InitSpec {
    pub fn generate(&self, dim: usize) -> Result<Vec<f64>, ConfigError> {
        match self {
            InitSpec::Ones => Ok(vec![1.0; dim]),
            InitSpec::Inline { values } => {
                if values.len() != dim {
                    return Err(ConfigError::Field {
                        field: "x0",
                        msg: format!("expected {dim} values, got {}", values.len()),
                    });
                }
                Ok(values.clone())
            }
            InitSpec::Uniform { lo, hi, seed } => {
                if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
                    return Err(ConfigError::Field { field: "x0", msg: "hi must exceed lo".into() });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..dim).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect())
            }
            InitSpec::UniformPositive { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..dim).map(|_| 0.5 + rng.random::<f64>()).collect())
            }
        }
    }
}
