//! Activation processes: which components update at each tick.

use super::EngineError;
use crate::algo::NodeUpdate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Realizes the per-tick update indicator for every node.
#[derive(Debug, Clone, PartialEq)]
pub enum ActivationProcess {
    /// Every component updates every tick.
    Synchronous,
    /// Node `i` updates independently with probability `rates[i]` per tick.
    PerNodeBernoulli { rates: Vec<f64> },
    /// Geometric inter-update times with the given per-node means.
    PerNodePeriodicRandom { mean_intervals: Vec<f64> },
    /// Exactly one node per tick, chosen proportionally to `weights`
    /// (single-poller protocols).
    SingleWeighted { weights: Vec<f64> },
    /// Externally scheduled updates, one entry per tick (CSMA link feeds).
    External { feed: Vec<Vec<NodeUpdate>> },
}

impl ActivationProcess {
    pub fn validate(&self, d: usize, horizon: u64) -> Result<(), EngineError> {
        match self {
            ActivationProcess::Synchronous => Ok(()),
            ActivationProcess::PerNodeBernoulli { rates } => {
                if rates.len() != d {
                    return Err(EngineError::ActivationDimension { expected: d, got: rates.len() });
                }
                for (node, &rate) in rates.iter().enumerate() {
                    if !(rate > 0.0 && rate <= 1.0) {
                        return Err(EngineError::BadRate { node, rate });
                    }
                }
                Ok(())
            }
            ActivationProcess::PerNodePeriodicRandom { mean_intervals } => {
                if mean_intervals.len() != d {
                    return Err(EngineError::ActivationDimension {
                        expected: d,
                        got: mean_intervals.len(),
                    });
                }
                for (node, &mean) in mean_intervals.iter().enumerate() {
                    if !(mean >= 1.0 && mean.is_finite()) {
                        return Err(EngineError::BadMeanInterval { node, mean });
                    }
                }
                Ok(())
            }
            ActivationProcess::SingleWeighted { weights } => {
                if weights.len() != d {
                    return Err(EngineError::ActivationDimension { expected: d, got: weights.len() });
                }
                for (node, &w) in weights.iter().enumerate() {
                    if !(w > 0.0 && w.is_finite()) {
                        return Err(EngineError::BadRate { node, rate: w });
                    }
                }
                Ok(())
            }
            ActivationProcess::External { feed } => {
                if (feed.len() as u64) < horizon {
                    return Err(EngineError::FeedExhausted {
                        horizon,
                        got: feed.len() as u64,
                    });
                }
                for updates in feed {
                    for u in updates {
                        if u.node >= d || u.forced_neighbor.is_some_and(|j| j >= d) {
                            return Err(EngineError::ActivationDimension { expected: d, got: u.node + 1 });
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Short description embedded in trace metadata.
    pub fn descriptor(&self) -> String {
        match self {
            ActivationProcess::Synchronous => "synchronous".into(),
            ActivationProcess::PerNodeBernoulli { rates } => format!("bernoulli{rates:?}"),
            ActivationProcess::PerNodePeriodicRandom { mean_intervals } => {
                format!("periodic_random{mean_intervals:?}")
            }
            ActivationProcess::SingleWeighted { weights } => format!("single_weighted{weights:?}"),
            ActivationProcess::External { feed } => format!("external({} ticks)", feed.len()),
        }
    }

    pub(crate) fn start(&self, rng: &mut ChaCha8Rng) -> ActivationState<'_> {
        match self {
            ActivationProcess::Synchronous => ActivationState::Synchronous,
            ActivationProcess::PerNodeBernoulli { rates } => {
                ActivationState::Bernoulli { rates: rates.clone() }
            }
            ActivationProcess::PerNodePeriodicRandom { mean_intervals } => {
                let next = mean_intervals
                    .iter()
                    .map(|&m| sample_geometric(1.0 / m, rng) - 1)
                    .collect();
                ActivationState::Periodic { means: mean_intervals.clone(), next }
            }
            ActivationProcess::SingleWeighted { weights } => ActivationState::Weighted {
                weights: weights.clone(),
                total: weights.iter().sum(),
            },
            ActivationProcess::External { feed } => ActivationState::External { feed },
        }
    }
}

pub(crate) enum ActivationState<'a> {
    Synchronous,
    Bernoulli { rates: Vec<f64> },
    Periodic { means: Vec<f64>, next: Vec<u64> },
    Weighted { weights: Vec<f64>, total: f64 },
    External { feed: &'a Vec<Vec<NodeUpdate>> },
}

impl<'a> ActivationState<'a> {
    pub(crate) fn updates_for_tick(
        &mut self,
        tick: u64,
        d: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<NodeUpdate> {
        match self {
            ActivationState::Synchronous => (0..d).map(NodeUpdate::free).collect(),
            ActivationState::Bernoulli { rates } => (0..d)
                .filter(|&i| rng.random::<f64>() < rates[i])
                .map(NodeUpdate::free)
                .collect(),
            ActivationState::Periodic { means, next } => {
                let mut updates = Vec::new();
                for i in 0..d {
                    if next[i] == tick {
                        updates.push(NodeUpdate::free(i));
                        next[i] = tick + sample_geometric(1.0 / means[i], rng);
                    }
                }
                updates
            }
            ActivationState::Weighted { weights, total } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = weights.len() - 1;
                for (i, &w) in weights.iter().enumerate() {
                    acc += w;
                    if u * *total < acc {
                        chosen = i;
                        break;
                    }
                }
                vec![NodeUpdate::free(chosen)]
            }
            ActivationState::External { feed } => feed[tick as usize].clone(),
        }
    }
}

/// Geometric variate on {1, 2, ...} with success probability `p`.
fn sample_geometric(p: f64, rng: &mut ChaCha8Rng) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = rng.random();
    let g = ((1.0 - u).ln() / (1.0 - p).ln()).ceil();
    (g as u64).max(1)
}
