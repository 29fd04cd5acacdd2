//! Shared simulation core.
//!
//! [`run`] drives one scheme over a global tick clock: at each tick the
//! activation process decides which components update, the step rule is
//! applied to them against the pre-tick state, the per-node running average
//! is advanced, and metrics are recorded. Everything is deterministic per
//! `(config, seed)`; a NaN or Inf in the state aborts the run with the tick
//! and node rather than clamping.

mod activation;
mod noise;
mod rng;
mod schedule;
mod trace;

pub use activation::ActivationProcess;
pub use noise::NoiseModel;
pub use rng::RngStream;
pub use schedule::StepSchedule;
pub use trace::{multi_seed_aggregate, AggregateRow, AggregateSummary, RunTrace, TraceRow};

use crate::algo::{GossipAlgorithm, StepContext, StepError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("record_every must be at least 1")]
    ZeroRecordEvery,
    #[error("x0 length {got} does not match state dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("external activation feed covers {got} ticks, horizon is {horizon}")]
    FeedExhausted { horizon: u64, got: u64 },
    #[error("activation rate for node {node} must lie in (0, 1], got {rate}")]
    BadRate { node: usize, rate: f64 },
    #[error("mean inter-update time for node {node} must be >= 1, got {mean}")]
    BadMeanInterval { node: usize, mean: f64 },
    #[error("activation vector length {got} does not match dimension {expected}")]
    ActivationDimension { expected: usize, got: usize },
    #[error("invalid schedule: {0}")]
    BadSchedule(String),
    #[error("invalid noise model: {0}")]
    BadNoise(String),
    #[error("non-finite state at tick {tick}, node {node}")]
    NonFinite { tick: u64, node: usize },
    #[error("non-finite metric recorded at tick {tick}")]
    NonFiniteMetric { tick: u64 },
    #[error("step rule aborted at tick {tick}: {source}")]
    Aborted {
        tick: u64,
        #[source]
        source: StepError,
    },
    #[error("aggregation requires at least one trace")]
    EmptyAggregate,
    #[error("traces have mismatched configurations: {0}")]
    MismatchedConfigs(String),
    #[error("span seminorm of an empty vector")]
    EmptyVector,
}

/// Span seminorm: `max_i x_i - min_i x_i`.
pub fn span_seminorm(x: &[f64]) -> Result<f64, EngineError> {
    if x.is_empty() {
        return Err(EngineError::EmptyVector);
    }
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// Parallel per-node running average: `z + (x_next - z) / (n + 1)`.
pub fn running_average_update(z: &[f64], x_next: &[f64], n: u64) -> Vec<f64> {
    let w = 1.0 / (n + 1) as f64;
    z.iter().zip(x_next).map(|(z, x)| z + w * (x - z)).collect()
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub schedule: StepSchedule,
    pub activation: ActivationProcess,
    pub noise: NoiseModel,
    pub horizon: u64,
    pub seed: u64,
    pub record_every: u64,
    /// Keep a full state snapshot at every recorded tick.
    pub keep_snapshots: bool,
}

impl RunOptions {
    pub fn new(schedule: StepSchedule, activation: ActivationProcess, noise: NoiseModel) -> Self {
        Self {
            schedule,
            activation,
            noise,
            horizon: 10_000,
            seed: 0,
            record_every: 100,
            keep_snapshots: false,
        }
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_record_every(mut self, record_every: u64) -> Self {
        self.record_every = record_every;
        self
    }

    pub fn with_snapshots(mut self) -> Self {
        self.keep_snapshots = true;
        self
    }

    fn config_key(&self, dim: usize, extra_columns: &[String]) -> String {
        format!(
            "d={dim};schedule={:?};activation={};noise={:?};horizon={};record_every={};extras={:?}",
            self.schedule,
            self.activation.descriptor(),
            self.noise,
            self.horizon,
            self.record_every,
            extra_columns,
        )
    }
}

/// Drive `algo` from `x0` for `horizon` ticks.
pub fn run(
    algo: &mut dyn GossipAlgorithm,
    x0: &[f64],
    opts: &RunOptions,
) -> Result<RunTrace, EngineError> {
    if opts.horizon == 0 {
        return Err(EngineError::ZeroHorizon);
    }
    if opts.record_every == 0 {
        return Err(EngineError::ZeroRecordEvery);
    }
    opts.schedule.validate()?;
    opts.noise.validate()?;
    let d = algo.dim();
    opts.activation.validate(d, opts.horizon)?;

    let streams = RngStream::new(opts.seed);
    let mut init_rng = streams.substream("init", 0);
    let mut activation_rng = streams.substream("activation", 0);
    let mut model_rng = streams.substream("model", 0);

    let mut x = match algo.init_override(&mut init_rng) {
        Some(x) => x,
        None => x0.to_vec(),
    };
    if x.len() != d {
        return Err(EngineError::DimensionMismatch { expected: d, got: x.len() });
    }
    let target = algo.target();
    if target.len() != d {
        return Err(EngineError::DimensionMismatch { expected: d, got: target.len() });
    }
    let mut z = x.clone();

    let extra_columns: Vec<String> =
        algo.extra_columns().into_iter().map(str::to_string).collect();
    let mut trace = RunTrace {
        seed: opts.seed,
        config_key: opts.config_key(d, &extra_columns),
        extra_columns,
        rows: Vec::new(),
        snapshots: Vec::new(),
        final_x: Vec::new(),
        final_z: Vec::new(),
    };
    record(&mut trace, algo, 0, &x, &z, &target, opts.keep_snapshots)?;

    let mut activation = opts.activation.start(&mut activation_rng);
    for n in 0..opts.horizon {
        let updates = activation.updates_for_tick(n, d, &mut activation_rng);
        let ctx = StepContext {
            tick: n,
            stepsize: opts.schedule.at(n),
            schedule: &opts.schedule,
            noise: &opts.noise,
            updates: &updates,
        };
        algo.step(&mut x, &ctx, &mut model_rng)
            .map_err(|source| EngineError::Aborted { tick: n, source })?;
        if let Some(node) = x.iter().position(|v| !v.is_finite()) {
            return Err(EngineError::NonFinite { tick: n, node });
        }
        z = running_average_update(&z, &x, n);
        let now = n + 1;
        if now % opts.record_every == 0 || now == opts.horizon {
            record(&mut trace, algo, now, &x, &z, &target, opts.keep_snapshots)?;
        }
    }
    trace.final_x = x;
    trace.final_z = z;
    Ok(trace)
}

fn record(
    trace: &mut RunTrace,
    algo: &mut dyn GossipAlgorithm,
    n: u64,
    x: &[f64],
    z: &[f64],
    target: &[f64],
    keep_snapshot: bool,
) -> Result<(), EngineError> {
    let diff: Vec<f64> = x.iter().zip(target).map(|(x, t)| x - t).collect();
    let sup_err = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let span_err = span_seminorm(&diff)?;
    let consensus = x.iter().sum::<f64>() / x.len() as f64;
    let extras = algo.extras(x, z);
    if !(sup_err.is_finite() && span_err.is_finite() && consensus.is_finite())
        || extras.iter().any(|v| !v.is_finite())
    {
        return Err(EngineError::NonFiniteMetric { tick: n });
    }
    if keep_snapshot {
        trace.snapshots.push((n, x.to_vec()));
    }
    trace.rows.push(TraceRow { n, sup_err, span_err, consensus, extras });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::{GossipAlgorithm, StepContext, StepError};
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    /// Minimal stub: active nodes move halfway toward a sampled uniform value.
    struct Jitter {
        d: usize,
    }

    impl GossipAlgorithm for Jitter {
        fn dim(&self) -> usize {
            self.d
        }
        fn target(&self) -> Vec<f64> {
            vec![0.5; self.d]
        }
        fn step(
            &mut self,
            x: &mut [f64],
            ctx: &StepContext<'_>,
            rng: &mut ChaCha8Rng,
        ) -> Result<(), StepError> {
            for u in ctx.updates {
                let v: f64 = rng.random();
                x[u.node] = (1.0 - ctx.stepsize) * x[u.node] + ctx.stepsize * v;
            }
            Ok(())
        }
    }

    fn opts() -> RunOptions {
        RunOptions::new(
            StepSchedule::Constant { a: 0.5 },
            ActivationProcess::Synchronous,
            NoiseModel::None,
        )
        .with_horizon(100)
        .with_record_every(10)
    }

    #[test]
    fn span_seminorm_examples() {
        assert_eq!(span_seminorm(&[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(span_seminorm(&[2.5, 2.5, 2.5]).unwrap(), 0.0);
        assert_eq!(span_seminorm(&[3.0, -1.0, 2.0]).unwrap(), 4.0);
        assert!(matches!(span_seminorm(&[]), Err(EngineError::EmptyVector)));
    }

    #[test]
    fn running_average_examples() {
        assert_eq!(running_average_update(&[0.0], &[1.0], 0), vec![1.0]);
        let z = vec![0.3, 0.7];
        assert_eq!(running_average_update(&z, &z, 5), z);
        assert_eq!(running_average_update(&[0.0, 0.0], &[2.0, 4.0], 1), vec![1.0, 2.0]);
    }

    #[test]
    fn zero_horizon_rejected() {
        let mut algo = Jitter { d: 2 };
        let err = run(&mut algo, &[0.0, 1.0], &opts().with_horizon(0));
        assert!(matches!(err, Err(EngineError::ZeroHorizon)));
    }

    #[test]
    fn same_seed_identical_csv() {
        let run_once = || {
            let mut algo = Jitter { d: 3 };
            run(&mut algo, &[0.0, 0.5, 1.0], &opts().with_seed(42)).unwrap().csv_string()
        };
        let a = run_once();
        let b = run_once();
        assert_eq!(a, b);
        assert!(a.starts_with("n,supErr,spanErr,consensus\n"));

        let mut algo = Jitter { d: 3 };
        let c = run(&mut algo, &[0.0, 0.5, 1.0], &opts().with_seed(43)).unwrap().csv_string();
        assert_ne!(a, c);
    }

    #[test]
    fn records_initial_and_final_rows() {
        let mut algo = Jitter { d: 2 };
        let trace = run(&mut algo, &[0.0, 1.0], &opts().with_horizon(25)).unwrap();
        assert_eq!(trace.rows.first().unwrap().n, 0);
        assert_eq!(trace.rows.last().unwrap().n, 25);
        // 0, 10, 20, 25
        assert_eq!(trace.rows.len(), 4);
    }

    #[test]
    fn nonfinite_state_aborts_with_diagnostic() {
        struct Blowup;
        impl GossipAlgorithm for Blowup {
            fn dim(&self) -> usize {
                2
            }
            fn target(&self) -> Vec<f64> {
                vec![0.0; 2]
            }
            fn step(
                &mut self,
                x: &mut [f64],
                ctx: &StepContext<'_>,
                _rng: &mut ChaCha8Rng,
            ) -> Result<(), StepError> {
                if ctx.tick == 3 {
                    x[1] = f64::NAN;
                }
                Ok(())
            }
        }
        let err = run(&mut Blowup, &[0.0, 0.0], &opts()).unwrap_err();
        match err {
            EngineError::NonFinite { tick, node } => {
                assert_eq!(tick, 3);
                assert_eq!(node, 1);
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
