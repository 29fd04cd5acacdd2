//! Relative-value-iteration gossip: an averaging scheme that converges to
//! the true stationary average regardless of update-rate asymmetry, at the
//! price of broadcasting (or estimating) a normalization term.
//!
//! Also houses the executable error machinery for the constant-stepsize
//! iterates: the linear error dynamics `e(n+1) = (I + aA) e(n) + a M(n+1)`
//! with `A = P - I - 1 e_anchor^T`, its expected-error curve, and the
//! McDiarmid-style concentration bound.

use crate::algo::{GossipAlgorithm, StepContext, StepError};
use crate::netgraph::{solve_poisson, NetError, StochasticMatrix};
use crate::variants::NeighborSampler;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RviError {
    #[error("importance sampling is not supported by the relative-value scheme")]
    UnsupportedSampler,
    #[error("anchor {anchor} out of range for {d} nodes")]
    BadAnchor { anchor: usize, d: usize },
    #[error("normalization mix matrix must have dimension {expected}, got {got}")]
    MixDimension { expected: usize, got: usize },
    #[error("fast/slow stepsize ratio must be >= 1, got {0}")]
    BadRatio(f64),
    #[error("spectral radius of I + aA is {rho} >= 1")]
    Divergent { rho: f64 },
    #[error("operator-norm series did not settle after {iterations} terms")]
    SeriesStalled { iterations: usize },
    #[error("concentration bound requires K > 0, got {0}")]
    BadK(f64),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// One relative-value pull update for component `i`:
/// `(1 - a) y_i + a (y_xi + w + cost_i - y_anchor)`.
#[allow(clippy::too_many_arguments)]
pub fn rvi_step(
    p: &StochasticMatrix,
    i: usize,
    y: &[f64],
    xi: usize,
    a: f64,
    cost: &[f64],
    anchor: usize,
    w: f64,
) -> Result<f64, StepError> {
    if p.entry(i, xi) <= 0.0 {
        return Err(StepError::SupportViolation { node: i, sampled: xi });
    }
    Ok((1.0 - a) * y[i] + a * (y[xi] + w + cost[i] - y[anchor]))
}

/// `A = P - I - 1 e_anchor^T`, the drift matrix of the error dynamics.
/// Its eigenvalues are -1 together with `lambda - 1` for each eigenvalue
/// `lambda != 1` of `P`.
pub fn error_dynamics_matrix(p: &StochasticMatrix, anchor: usize) -> DMatrix<f64> {
    let d = p.dim();
    let mut a = p.matrix() - DMatrix::<f64>::identity(d, d);
    for i in 0..d {
        a[(i, anchor)] -= 1.0;
    }
    a
}

/// `E[e(n)] = (I + aA)^n e(0)`, by repeated matrix-vector products.
pub fn expected_error_curve(a_matrix: &DMatrix<f64>, a: f64, e0: &[f64], n: u64) -> Vec<f64> {
    let d = a_matrix.nrows();
    let m = DMatrix::<f64>::identity(d, d) + a_matrix * a;
    let mut e = DVector::from_column_slice(e0);
    for _ in 0..n {
        e = &m * e;
    }
    e.iter().copied().collect()
}

/// Constant-stepsize error model: `I + aA`, its spectral radius, and the
/// operator-norm series `C = sum_k ||(I + aA)^k||` (spectral norms, summed
/// until the geometric tail estimate drops below 1e-12).
#[derive(Debug, Clone)]
pub struct RviErrorModel {
    pub a_matrix: DMatrix<f64>,
    pub stepsize: f64,
    pub spectral_radius: f64,
    pub norm_series: f64,
}

const SERIES_TAIL_TOL: f64 = 1e-12;
const SERIES_MAX_TERMS: usize = 200_000;

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0f64, f64::max)
}

impl RviErrorModel {
    pub fn new(a_matrix: DMatrix<f64>, stepsize: f64) -> Result<Self, RviError> {
        let d = a_matrix.nrows();
        let m = DMatrix::<f64>::identity(d, d) + &a_matrix * stepsize;
        let rho = m.clone().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if rho >= 1.0 {
            return Err(RviError::Divergent { rho });
        }
        let mut series = 0.0;
        let mut power = DMatrix::<f64>::identity(d, d);
        let mut prev_norm = f64::INFINITY;
        let mut settled = false;
        for _ in 0..SERIES_MAX_TERMS {
            let norm = spectral_norm(&power);
            series += norm;
            if norm < prev_norm {
                let ratio = norm / prev_norm;
                if norm * ratio / (1.0 - ratio) < SERIES_TAIL_TOL {
                    settled = true;
                    break;
                }
            }
            prev_norm = norm;
            power = &power * &m;
        }
        if !settled {
            return Err(RviError::SeriesStalled { iterations: SERIES_MAX_TERMS });
        }
        Ok(Self { a_matrix, stepsize, spectral_radius: rho, norm_series: series })
    }

    pub fn from_chain(p: &StochasticMatrix, anchor: usize, stepsize: f64) -> Result<Self, RviError> {
        if anchor >= p.dim() {
            return Err(RviError::BadAnchor { anchor, d: p.dim() });
        }
        Self::new(error_dynamics_matrix(p, anchor), stepsize)
    }

    /// Tail probability bound for `||e(n) - E[e(n)]|| >= K a`:
    /// `2d exp(-K^2 / (4 C d^2 ||x0||_inf))`.
    pub fn concentration_bound(&self, x0: &[f64], k: f64) -> Result<f64, RviError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(RviError::BadK(k));
        }
        let d = self.a_matrix.nrows() as f64;
        let x0_inf = x0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let exponent = -k * k / (4.0 * self.norm_series * d * d * x0_inf);
        Ok(2.0 * d * exponent.exp())
    }
}

/// How the scheme obtains the scalar it subtracts each update.
#[derive(Debug, Clone)]
pub enum Normalization {
    /// Instantaneous global read of the anchor component.
    Anchor,
    /// Distributed surrogate: an auxiliary iterate per node is driven on a
    /// faster timescale (`b = ratio * a`, capped at 1) by pulls of the slow
    /// iterate sampled via `mix`, and each node subtracts its own surrogate.
    WeightedAverage { mix: StochasticMatrix, stepsize_ratio: f64 },
}

impl Normalization {
    /// The default distributed surrogate: uniform mixing, whose stationary
    /// vector weights all nodes equally and makes every node's surrogate
    /// track the same functional of the slow iterate.
    pub fn uniform_weighted_average(d: usize, stepsize_ratio: f64) -> Self {
        let rows = vec![vec![1.0 / d as f64; d]; d];
        Normalization::WeightedAverage {
            mix: StochasticMatrix::from_rows(&rows).expect("uniform rows are stochastic"),
            stepsize_ratio,
        }
    }
}

/// The relative-value gossip scheme.
pub struct RviGossip {
    sampler: NeighborSampler,
    cost: Vec<f64>,
    anchor: usize,
    normalization: Normalization,
    fast: Option<Vec<f64>>,
    vstar: Vec<f64>,
    beta: f64,
    per_node_steps: bool,
    nu: Vec<u64>,
}

impl RviGossip {
    /// `cost` is the initial data vector; the scheme's estimate converges to
    /// the stationary average of `cost` under the sampler's drift matrix.
    pub fn new(
        sampler: NeighborSampler,
        cost: Vec<f64>,
        anchor: usize,
        normalization: Normalization,
        per_node_steps: bool,
    ) -> Result<Self, RviError> {
        if matches!(sampler, NeighborSampler::Importance { .. }) {
            return Err(RviError::UnsupportedSampler);
        }
        let d = sampler.dim();
        if anchor >= d {
            return Err(RviError::BadAnchor { anchor, d });
        }
        if cost.len() != d {
            return Err(RviError::Net(NetError::DimensionMismatch { expected: d, got: cost.len() }));
        }
        if let Normalization::WeightedAverage { mix, stepsize_ratio } = &normalization {
            if mix.dim() != d {
                return Err(RviError::MixDimension { expected: d, got: mix.dim() });
            }
            if !mix.is_irreducible() {
                return Err(RviError::Net(NetError::Reducible));
            }
            if *stepsize_ratio < 1.0 {
                return Err(RviError::BadRatio(*stepsize_ratio));
            }
        }
        let effective = sampler.effective_matrix()?;
        let poisson = solve_poisson(&effective, &cost, anchor)?;
        Ok(Self {
            sampler,
            cost,
            anchor,
            normalization,
            fast: None,
            vstar: poisson.v,
            beta: poisson.beta,
            per_node_steps,
            nu: vec![0; d],
        })
    }

    /// The stationary average the estimate converges to.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The relative-value solution the iterates converge to.
    pub fn vstar(&self) -> &[f64] {
        &self.vstar
    }

    fn estimate(&self, x: &[f64]) -> f64 {
        match (&self.normalization, &self.fast) {
            (Normalization::Anchor, _) => x[self.anchor],
            (Normalization::WeightedAverage { .. }, Some(fast)) => fast[self.anchor],
            (Normalization::WeightedAverage { .. }, None) => x[self.anchor],
        }
    }
}

impl GossipAlgorithm for RviGossip {
    fn dim(&self) -> usize {
        self.sampler.dim()
    }

    fn target(&self) -> Vec<f64> {
        self.vstar.clone()
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        let mut cols = vec!["estimate", "mse_vs_Vstar"];
        if matches!(self.sampler, NeighborSampler::TwoHop { .. }) {
            cols.push("cold_start");
        }
        cols
    }

    fn step(
        &mut self,
        x: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let old = x.to_vec();
        if let Normalization::WeightedAverage { mix, stepsize_ratio } = &self.normalization {
            // The surrogate runs on the fast timescale: every node, every tick.
            let fast = self.fast.get_or_insert_with(|| old.clone());
            let b = (stepsize_ratio * ctx.stepsize).min(1.0);
            for (i, f) in fast.iter_mut().enumerate() {
                let z = mix.sample_row(i, rng.random());
                *f += b * (old[z] - *f);
            }
        }
        for u in ctx.updates {
            let i = u.node;
            let a = if self.per_node_steps { ctx.schedule.at(self.nu[i]) } else { ctx.stepsize };
            self.nu[i] += 1;
            let (value, _weight) = self.sampler.pull(*u, &old, rng)?;
            let w = ctx.noise.sample(rng);
            let norm = match &self.normalization {
                Normalization::Anchor => old[self.anchor],
                Normalization::WeightedAverage { .. } => {
                    self.fast.as_ref().expect("initialized above")[i]
                }
            };
            x[i] = (1.0 - a) * old[i] + a * (value + w + self.cost[i] - norm);
        }
        Ok(())
    }

    fn extras(&mut self, x: &[f64], _z: &[f64]) -> Vec<f64> {
        let mse = x
            .iter()
            .zip(&self.vstar)
            .map(|(y, v)| (y - v) * (y - v))
            .sum::<f64>()
            / x.len() as f64;
        let mut extras = vec![self.estimate(x), mse];
        if matches!(self.sampler, NeighborSampler::TwoHop { .. }) {
            extras.push(self.sampler.cold_starts() as f64);
        }
        extras
    }
}
