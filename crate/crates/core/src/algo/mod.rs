//! The common interface every gossip scheme implements, plus the by-name
//! registry used to select a scheme at runtime.

pub mod registry;

use crate::engine::{NoiseModel, StepSchedule};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// One component update scheduled for the current tick. `forced_neighbor`
/// is set by externally driven activations (CSMA link events) where the
/// partner is decided by the protocol rather than sampled by the node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeUpdate {
    pub node: usize,
    pub forced_neighbor: Option<usize>,
}

impl NodeUpdate {
    pub fn free(node: usize) -> Self {
        Self { node, forced_neighbor: None }
    }

    pub fn forced(node: usize, neighbor: usize) -> Self {
        Self { node, forced_neighbor: Some(neighbor) }
    }
}

/// Everything a step rule may consult during one tick.
pub struct StepContext<'a> {
    /// Global tick index `n`.
    pub tick: u64,
    /// `schedule.at(tick)`, the globally indexed stepsize.
    pub stepsize: f64,
    /// The full schedule, for schemes that index stepsizes by per-node
    /// update counters instead of the global clock.
    pub schedule: &'a StepSchedule,
    pub noise: &'a NoiseModel,
    /// Components to update this tick.
    pub updates: &'a [NodeUpdate],
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error("sampled neighbor {sampled} outside the support of row {node}")]
    SupportViolation { node: usize, sampled: usize },
    #[error("iterate left the positive orthant at node {node}")]
    NonPositive { node: usize },
    #[error("state dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("zero vector in {context}")]
    ZeroVector { context: &'static str },
    #[error("forced neighbor missing for node {node}")]
    MissingForcedNeighbor { node: usize },
}

/// A gossip step rule, driven tick by tick by the engine.
///
/// Implementations own the immutable problem data (matrices, weights,
/// anchors) and any auxiliary mutable state (stored copies, fast iterates,
/// per-node counters). The evolving node vector itself is owned by the
/// engine's sequential run loop and passed in by mutable slice.
pub trait GossipAlgorithm {
    /// State dimension `d`.
    fn dim(&self) -> usize;

    /// Oracle target for the trace error metrics `supErr` and `spanErr`.
    fn target(&self) -> Vec<f64>;

    /// Names of algorithm-specific trace columns.
    fn extra_columns(&self) -> Vec<&'static str> {
        Vec::new()
    }

    /// Apply one tick: update the activated components of `x` in place.
    /// All reads of neighbor values within a tick see the pre-tick state.
    fn step(&mut self, x: &mut [f64], ctx: &StepContext<'_>, rng: &mut ChaCha8Rng)
        -> Result<(), StepError>;

    /// Values for the extra trace columns given the current state and
    /// running average.
    fn extras(&mut self, _x: &[f64], _z: &[f64]) -> Vec<f64> {
        Vec::new()
    }

    /// Schemes that define their own initial state (e.g. streaming PCA
    /// initializes from the first sample) return it here; the engine then
    /// ignores the caller-provided `x0`.
    fn init_override(&mut self, _rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        None
    }
}
