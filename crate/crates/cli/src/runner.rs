//! Experiment execution: builds the scheme fresh per seed, runs it through
//! the engine, and writes one trace CSV per seed plus an aggregate CSV and
//! a metadata record with the oracle reference values.

use crate::config::{ActivationSpec, ConfigError, ExperimentConfig, PreparedExperiment};
use gossip_core::algo::registry::{self, BuildContext, BuildError};
use gossip_core::csma::{learn_multipliers, ActivationFamily, CsmaError, LearnOptions};
use gossip_core::engine::{
    self, multi_seed_aggregate, ActivationProcess, AggregateSummary, EngineError, RunOptions,
    RunTrace,
};
use gossip_core::netgraph::{solve_poisson, stationary_distribution, StochasticMatrix};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("algorithm build failed: {0}")]
    Build(#[from] BuildError),
    #[error("csma layer failed: {0}")]
    Csma(#[from] CsmaError),
    #[error("run aborted numerically (seed {seed}): {source}")]
    Numeric {
        seed: u64,
        #[source]
        source: EngineError,
    },
    #[error("engine rejected the configuration: {0}")]
    Engine(EngineError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code: 2 for validation failures, 3 for numeric aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric { .. } => 3,
            _ => 2,
        }
    }
}

fn engine_error(seed: u64, e: EngineError) -> CliError {
    match e {
        EngineError::NonFinite { .. }
        | EngineError::NonFiniteMetric { .. }
        | EngineError::Aborted { .. } => CliError::Numeric { seed, source: e },
        other => CliError::Engine(other),
    }
}

pub struct ExperimentOutcome {
    pub traces: Vec<RunTrace>,
    pub aggregate: AggregateSummary,
    pub metadata: serde_json::Value,
}

/// Run every seed of an experiment; when `out_dir` is given, write
/// `trace_seed<seed>.csv` per seed, `aggregate.csv`, and `metadata.json`.
pub fn run_experiment(
    config: &ExperimentConfig,
    base_dir: &Path,
    out_dir: Option<&Path>,
) -> Result<ExperimentOutcome, CliError> {
    let prepared = config.prepare(base_dir)?;
    // Surface algorithm/parameter problems before any run.
    let reference = build_algorithm(config, &prepared)?;
    let oracle = oracle_reference(config, &prepared, reference.as_ref());

    let mut traces = Vec::with_capacity(prepared.seeds.len());
    let mut effective_horizons = Vec::with_capacity(prepared.seeds.len());
    for &seed in &prepared.seeds {
        let mut algo = build_algorithm(config, &prepared)?;
        let (activation, horizon) = build_activation(config, &prepared, seed)?;
        let opts = RunOptions::new(config.schedule.clone(), activation, config.noise)
            .with_horizon(horizon)
            .with_record_every(config.record_every.min(horizon))
            .with_seed(seed);
        let trace =
            engine::run(algo.as_mut(), &prepared.x0, &opts).map_err(|e| engine_error(seed, e))?;
        effective_horizons.push(horizon);
        traces.push(trace);
    }

    let aggregate = multi_seed_aggregate(&traces).map_err(CliError::Engine)?;
    let metadata = json!({
        "name": config.name,
        "config": serde_json::to_value(config).expect("config serializes"),
        "seeds": prepared.seeds,
        "effective_horizons": effective_horizons,
        "network": network_metadata(&prepared),
        "oracle": oracle,
    });

    if let Some(dir) = out_dir {
        write_outputs(dir, &traces, &aggregate, &metadata)?;
    }
    Ok(ExperimentOutcome { traces, aggregate, metadata })
}

fn build_algorithm(
    config: &ExperimentConfig,
    prepared: &PreparedExperiment,
) -> Result<Box<dyn gossip_core::GossipAlgorithm>, CliError> {
    let ctx = BuildContext {
        network: prepared.network.as_ref(),
        x0: &prepared.x0,
        params: &config.algorithm.params,
    };
    Ok(registry::build(&config.algorithm.id, &ctx)?)
}

/// Resolve the activation process for one seed. CSMA activations are learned
/// per seed and the horizon shrinks to the realized event count.
fn build_activation(
    config: &ExperimentConfig,
    prepared: &PreparedExperiment,
    seed: u64,
) -> Result<(ActivationProcess, u64), CliError> {
    let d = prepared.x0.len();
    let process = match &config.activation {
        ActivationSpec::Synchronous => ActivationProcess::Synchronous,
        ActivationSpec::Bernoulli { rates } => {
            ActivationProcess::PerNodeBernoulli { rates: rates.clone() }
        }
        ActivationSpec::PeriodicRandom { mean_intervals } => {
            ActivationProcess::PerNodePeriodicRandom { mean_intervals: mean_intervals.clone() }
        }
        ActivationSpec::PeriodicRandomLinear { base, slope } => {
            ActivationProcess::PerNodePeriodicRandom {
                mean_intervals: (0..d).map(|i| base + slope * (i + 1) as f64).collect(),
            }
        }
        ActivationSpec::SingleWeighted { weights } => {
            ActivationProcess::SingleWeighted { weights: weights.clone() }
        }
        ActivationSpec::Csma { learn_blocks, alpha, clamp_zeta } => {
            let net = prepared.network.as_ref().ok_or(ConfigError::Field {
                field: "activation",
                msg: "csma activation requires a network".into(),
            })?;
            let p = StochasticMatrix::from_matrix(net.matrix().clone()).map_err(|e| {
                ConfigError::Field {
                    field: "activation",
                    msg: format!("csma activation requires a stochastic network: {e}"),
                }
            })?;
            let links: Vec<(usize, usize)> = (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && p.entry(i, j) > 0.0)
                .collect();
            let family = ActivationFamily::node_exclusive(links);
            let mut opts = LearnOptions::new(*learn_blocks, seed);
            opts.alpha = alpha.clone();
            opts.clamp_zeta = *clamp_zeta;
            opts.collect_events = true;
            let outcome = learn_multipliers(&family, &p, &opts)?;
            let mut feed = Vec::with_capacity(outcome.activation_events.len());
            for &(_, l) in &outcome.activation_events {
                let (i, j) = family.links()[l];
                feed.push(vec![gossip_core::algo::NodeUpdate::forced(i, j)]);
            }
            let horizon = (feed.len() as u64).min(config.horizon).max(1);
            feed.truncate(horizon as usize);
            return Ok((ActivationProcess::External { feed }, horizon));
        }
    };
    Ok((process, config.horizon))
}

fn network_metadata(prepared: &PreparedExperiment) -> serde_json::Value {
    match &prepared.network {
        None => json!(null),
        Some(net) => json!({
            "dim": net.dim(),
            "erdos_renyi": prepared.network_meta,
        }),
    }
}

/// Reference values computed by the dense oracle layer, embedded in the
/// metadata so downstream checks need no recomputation.
fn oracle_reference(
    config: &ExperimentConfig,
    prepared: &PreparedExperiment,
    algo: &dyn gossip_core::GossipAlgorithm,
) -> serde_json::Value {
    let mut oracle = json!({
        "target": algo.target(),
    });
    if let Some(net) = &prepared.network {
        if let Ok(p) = StochasticMatrix::from_matrix(net.matrix().clone()) {
            if let Ok(eta) = stationary_distribution(&p) {
                let beta: f64 = eta.iter().zip(&prepared.x0).map(|(e, x)| e * x).sum();
                oracle["eta"] = json!(eta);
                oracle["beta"] = json!(beta);
                if config.algorithm.id == "rvi" {
                    if let Ok(sol) = solve_poisson(&p, &prepared.x0, 0) {
                        oracle["vstar"] = json!(sol.v);
                    }
                }
            }
        }
        // For the pull ranking schemes the network itself is the ranked
        // matrix; the other schemes' oracle vector is already in `target`.
        if matches!(config.algorithm.id.as_str(), "pf" | "pf_alt" | "pf_mixed") {
            let uniform = vec![1.0 / net.dim() as f64; net.dim()];
            if let Ok((lambda, _)) = gossip_core::spectral::perron_target(net, &uniform) {
                oracle["lambda"] = json!(lambda);
            }
        }
        // Two-hop runs record the effective matrix's spectral data next to
        // the base matrix's.
        if let Some(alpha) = two_hop_alpha(&config.algorithm.params) {
            if let Ok(p) = StochasticMatrix::from_matrix(net.matrix().clone()) {
                if let Ok(mixed) = gossip_core::variants::multihop_matrix(&p, alpha) {
                    oracle["second_eigenvalue"] = json!({
                        "base": gossip_core::netgraph::second_eigenvalue_modulus(&p),
                        "effective": gossip_core::netgraph::second_eigenvalue_modulus(&mixed),
                        "alpha": alpha,
                    });
                }
            }
        }
    }
    oracle
}

fn two_hop_alpha(params: &serde_json::Value) -> Option<f64> {
    let sampling = params.get("sampling")?;
    if sampling.get("kind")?.as_str()? == "two_hop" {
        sampling.get("alpha")?.as_f64()
    } else {
        None
    }
}

fn write_outputs(
    dir: &Path,
    traces: &[RunTrace],
    aggregate: &AggregateSummary,
    metadata: &serde_json::Value,
) -> Result<(), CliError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source: std::io::Error| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for trace in traces {
        let path = dir.join(format!("trace_seed{}.csv", trace.seed));
        let mut file = fs::File::create(&path).map_err(io_err(&path))?;
        trace.write_csv(&mut file).map_err(io_err(&path))?;
    }
    let agg_path = dir.join("aggregate.csv");
    let mut file = fs::File::create(&agg_path).map_err(io_err(&agg_path))?;
    aggregate.write_csv(&mut file).map_err(io_err(&agg_path))?;
    let meta_path = dir.join("metadata.json");
    let pretty = serde_json::to_string_pretty(metadata).expect("metadata serializes");
    fs::write(&meta_path, pretty).map_err(io_err(&meta_path))?;
    Ok(())
}
