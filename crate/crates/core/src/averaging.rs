//! Averaging schemes: deterministic gossip, stochastic-approximation pull
//! gossip, and its asynchronous variant.
//!
//! The asynchronous sampled scheme always reaches *a* consensus under mild
//! activation conditions, but when nodes update at different rates the
//! reached value is biased away from the stationary average — the
//! [`wrong_consensus_experiment`] measures that bias.

use crate::algo::{GossipAlgorithm, StepContext, StepError};
use crate::engine::{self, ActivationProcess, EngineError, NoiseModel, RunOptions, StepSchedule};
use crate::netgraph::{stationary_distribution, NetError, StochasticMatrix};
use crate::variants::NeighborSampler;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One deterministic averaging sweep: returns `Px`.
pub fn sync_gossip_step(x: &[f64], p: &StochasticMatrix) -> Result<Vec<f64>, StepError> {
    if x.len() != p.dim() {
        return Err(StepError::Dimension { expected: p.dim(), got: x.len() });
    }
    Ok(p.apply(x))
}

/// Sampled pull update for component `i`:
/// `(1 - a) x_i + a (x_xi + w)`, with `xi` required to lie in the support
/// of row `i`.
pub fn sa_pull_step(
    p: &StochasticMatrix,
    i: usize,
    x: &[f64],
    xi: usize,
    a: f64,
    w: f64,
) -> Result<f64, StepError> {
    if p.entry(i, xi) <= 0.0 {
        return Err(StepError::SupportViolation { node: i, sampled: xi });
    }
    Ok((1.0 - a) * x[i] + a * (x[xi] + w))
}

/// The deterministic scheme `x(n+1) = P x(n)` on activated components.
pub struct DeterministicGossip {
    p: StochasticMatrix,
    target_value: f64,
}

impl DeterministicGossip {
    pub fn new(p: StochasticMatrix, x0: &[f64]) -> Result<Self, NetError> {
        let eta = stationary_distribution(&p)?;
        let target_value = eta.iter().zip(x0).map(|(e, x)| e * x).sum();
        Ok(Self { p, target_value })
    }
}

impl GossipAlgorithm for DeterministicGossip {
    fn dim(&self) -> usize {
        self.p.dim()
    }

    fn target(&self) -> Vec<f64> {
        vec![self.target_value; self.dim()]
    }

    fn step(
        &mut self,
        x: &mut [f64],
        ctx: &StepContext<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let old = x.to_vec();
        for u in ctx.updates {
            x[u.node] = self.p.row_dot(u.node, &old);
        }
        Ok(())
    }
}

/// Asynchronous stochastic-approximation gossip: each activated node pulls
/// one sampled (or externally forced) neighbor value and averages into it.
pub struct VanillaGossip {
    sampler: NeighborSampler,
    target_value: f64,
}

impl VanillaGossip {
    pub fn new(sampler: NeighborSampler, x0: &[f64]) -> Result<Self, NetError> {
        let eta = stationary_distribution(sampler.base_matrix())?;
        if x0.len() != sampler.dim() {
            return Err(NetError::DimensionMismatch { expected: sampler.dim(), got: x0.len() });
        }
        let target_value = eta.iter().zip(x0).map(|(e, x)| e * x).sum();
        Ok(Self { sampler, target_value })
    }

    pub fn target_value(&self) -> f64 {
        self.target_value
    }
}

impl GossipAlgorithm for VanillaGossip {
    fn dim(&self) -> usize {
        self.sampler.dim()
    }

    fn target(&self) -> Vec<f64> {
        vec![self.target_value; self.dim()]
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        match self.sampler {
            NeighborSampler::TwoHop { .. } => vec!["cold_start"],
            _ => Vec::new(),
        }
    }

    fn step(
        &mut self,
        x: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let old = x.to_vec();
        let a = ctx.stepsize;
        for u in ctx.updates {
            let (value, weight) = self.sampler.pull(*u, &old, rng)?;
            let w = ctx.noise.sample(rng);
            x[u.node] = (1.0 - a) * old[u.node] + a * weight * (value + w);
        }
        Ok(())
    }

    fn extras(&mut self, _x: &[f64], _z: &[f64]) -> Vec<f64> {
        match self.sampler {
            NeighborSampler::TwoHop { .. } => vec![self.sampler.cold_starts() as f64],
            _ => Vec::new(),
        }
    }
}

/// Configuration of the rate-asymmetry bias experiment. The default is the
/// canonical two-node instance: `P = [[0.7, 0.3], [0.5, 0.5]]`,
/// `x0 = [0, 1]`, node 2 updating twice as fast as node 1.
#[derive(Debug, Clone)]
pub struct WrongConsensusConfig {
    pub p: StochasticMatrix,
    pub x0: Vec<f64>,
    pub rates: Vec<f64>,
    pub seeds: u64,
    pub horizon: u64,
    pub schedule: StepSchedule,
    /// Consensus is declared once the span seminorm stays below this...
    pub consensus_tol: f64,
    /// ...for at least this many ticks through the end of the run.
    pub sustain_ticks: u64,
}

impl Default for WrongConsensusConfig {
    fn default() -> Self {
        Self {
            p: StochasticMatrix::from_rows(&[vec![0.7, 0.3], vec![0.5, 0.5]]).unwrap(),
            x0: vec![0.0, 1.0],
            rates: vec![0.5, 1.0],
            seeds: 200,
            horizon: 200_000,
            schedule: StepSchedule::Harmonic { c: 1.0 },
            consensus_tol: 1e-6,
            sustain_ticks: 1_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WrongConsensusSummary {
    /// Final consensus estimate (mean of the state) per seed.
    pub final_consensus: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Per-seed convergence flags (final span below tolerance).
    pub converged: Vec<bool>,
    pub non_converged: usize,
}

/// Run asynchronous vanilla gossip with decreasing steps across seeds and
/// report final-consensus statistics.
pub fn wrong_consensus_experiment(
    cfg: &WrongConsensusConfig,
) -> Result<WrongConsensusSummary, ExperimentError> {
    let mut final_consensus = Vec::with_capacity(cfg.seeds as usize);
    let mut converged = Vec::with_capacity(cfg.seeds as usize);
    let record_every = cfg.sustain_ticks.clamp(1, cfg.horizon);
    for seed in 0..cfg.seeds {
        let mut algo = VanillaGossip::new(NeighborSampler::plain(cfg.p.clone()), &cfg.x0)?;
        let opts = RunOptions::new(
            cfg.schedule.clone(),
            ActivationProcess::PerNodeBernoulli { rates: cfg.rates.clone() },
            NoiseModel::None,
        )
        .with_horizon(cfg.horizon)
        .with_record_every(record_every)
        .with_seed(seed);
        let trace = engine::run(&mut algo, &cfg.x0, &opts)?;
        // For a constant target the trace's spanErr equals span(x); consensus
        // is declared when it stays below tolerance for the sustain window.
        let below_since = trace
            .rows
            .iter()
            .rev()
            .take_while(|r| r.span_err < cfg.consensus_tol)
            .last()
            .map(|r| r.n);
        let sustained = below_since
            .is_some_and(|n| cfg.horizon >= cfg.sustain_ticks && n <= cfg.horizon - cfg.sustain_ticks);
        converged.push(sustained);
        final_consensus.push(trace.final_row().consensus);
    }
    let k = final_consensus.len() as f64;
    let mean = final_consensus.iter().sum::<f64>() / k;
    let std = if final_consensus.len() > 1 {
        (final_consensus.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    let non_converged = converged.iter().filter(|&&c| !c).count();
    Ok(WrongConsensusSummary { final_consensus, mean, std, converged, non_converged })
}
