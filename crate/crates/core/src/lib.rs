//! Gossip schemes for in-network averaging and spectral ranking.
//!
//! The crate has three layers:
//!
//! - [`netgraph`]: graphs, row-stochastic and nonnegative matrices, and the
//!   dense linear-algebra computations (stationary distributions, Poisson
//!   solves, Perron-Frobenius eigenpairs) that every stochastic scheme is
//!   validated against.
//! - [`engine`]: the shared simulation core — stepsize schedules, activation
//!   processes, measurement noise, deterministic seeded RNG streams, and
//!   trace/metric recording.
//! - The scheme family: [`averaging`], [`rvi`], [`variants`], [`spectral`],
//!   and the CSMA/CA activation layer in [`csma`]. Every scheme implements
//!   the [`algo::GossipAlgorithm`] trait and is registered by name in
//!   [`algo::registry`], so runners select variants at runtime from config.
//!
//! A single run is strictly sequential and deterministic: the same
//! `(config, seed)` pair produces a byte-identical trace. Independent runs
//! share nothing mutable and may execute concurrently.

pub mod algo;
pub mod averaging;
pub mod csma;
pub mod engine;
pub mod netgraph;
pub mod rvi;
pub mod spectral;
pub mod variants;

pub use algo::{GossipAlgorithm, StepContext};
pub use engine::{run, RunOptions, RunTrace};
pub use netgraph::{Graph, NonnegativeMatrix, StochasticMatrix};
