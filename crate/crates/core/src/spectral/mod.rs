//! Gossip estimation of the Perron-Frobenius eigenvector of a nonnegative
//! matrix, its variants, and the ranking applications built on it.
//!
//! The base scheme decomposes `Q = D P` into per-stage multiplicative costs
//! (the row sums) and a sampling kernel, then runs the normalized pull
//! iteration whose mean drift is `Q x / (alpha^T x) - x`. Iterates stay in
//! the open positive orthant along any trajectory; the engine aborts the run
//! if that is ever violated.

mod pca;

pub use pca::{alignment_angle, PcaBlock, PcaStochastic, PcaStream};

use crate::algo::{GossipAlgorithm, StepContext, StepError};
use crate::netgraph::{perron_eigenpair, NetError, NonnegativeMatrix, StochasticMatrix};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("temperature must be positive, got {0}")]
    BadTemperature(f64),
    #[error("node {node} has {got} neighbors, expected {expected}")]
    NeighborhoodSize { node: usize, expected: usize, got: usize },
    #[error("neighborhoods must be symmetric: {i} lists {j} but not conversely")]
    AsymmetricNeighborhoods { i: usize, j: usize },
    #[error("teleport weight must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("weights must be entrywise positive")]
    BadWeights,
    #[error("proposal kernel must dominate the sampling kernel at ({i}, {j})")]
    ProposalSupport { i: usize, j: usize },
    #[error("rating mean {value} at ({i}, {j}) must lie in [1, 10]")]
    BadRatingMean { i: usize, j: usize, value: f64 },
    #[error("activity weights must be positive and match the dimension")]
    BadActivity,
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Split `Q = D P`: the vector of row sums and the row-normalized sampling
/// kernel. Exact by construction; zero rows are rejected when `Q` is built.
pub fn decompose(q: &NonnegativeMatrix) -> (Vec<f64>, StochasticMatrix) {
    let d = q.dim();
    let sums = q.row_sums();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| q.entry(i, j) / sums[i]).collect())
        .collect();
    let p = StochasticMatrix::from_rows(&rows).expect("row normalization is stochastic");
    (sums, p)
}

/// Perron-Frobenius pair of `q` scaled so `alpha^T qstar = lambda`, for any
/// entrywise-positive `alpha` (not necessarily summing to one).
pub fn perron_target(q: &NonnegativeMatrix, alpha: &[f64]) -> Result<(f64, Vec<f64>), SpectralError> {
    if alpha.len() != q.dim() || alpha.iter().any(|&a| a <= 0.0) {
        return Err(SpectralError::BadWeights);
    }
    let uniform = vec![1.0 / q.dim() as f64; q.dim()];
    let pair = perron_eigenpair(q, &uniform)?;
    let dot: f64 = alpha.iter().zip(&pair.qstar).map(|(a, v)| a * v).sum();
    let qstar = pair.qstar.iter().map(|v| v * pair.lambda / dot).collect();
    Ok((pair.lambda, qstar))
}

/// Single normalized pull update:
/// `(1 - a) x_i + a * rowsum_i * likelihood * x_xi / xbar`.
pub fn pf_pull_value(
    i: usize,
    x: &[f64],
    xi: usize,
    a: f64,
    rowsum_i: f64,
    xbar: f64,
    likelihood: f64,
) -> f64 {
    (1.0 - a) * x[i] + a * rowsum_i * likelihood * x[xi] / xbar
}

/// The alternative normalization (time-rescaled dynamics, same fixed points):
/// `x_i + a (rowsum_i * likelihood * x_xi - xbar * x_i)`.
pub fn pf_alt_value(
    i: usize,
    x: &[f64],
    xi: usize,
    a: f64,
    rowsum_i: f64,
    xbar: f64,
    likelihood: f64,
) -> f64 {
    x[i] + a * (rowsum_i * likelihood * x[xi] - xbar * x[i])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sample_weights(w: &[f64], total: f64, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (j, &v) in w.iter().enumerate() {
        if v > 0.0 {
            last = j;
            acc += v;
            if u * total < acc {
                return j;
            }
        }
    }
    last
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfUpdate {
    /// `x_i <- (1-a) x_i + a q_i x_xi / xbar`.
    Standard,
    /// `x_i <- x_i + a (q_i x_xi - xbar x_i)`.
    AltNormalization,
}

/// How the scheme obtains the normalization `xbar = alpha^T x`.
#[derive(Debug, Clone)]
pub enum XbarMode {
    /// Instantaneous global read (isolates algorithm behavior).
    Exact,
    /// Per-node fast iterate pulling slow values sampled by `alpha`, on a
    /// faster timescale `b = ratio * a` (capped at 1).
    FastSurrogate { stepsize_ratio: f64 },
}

/// Pull-based Perron-Frobenius gossip, with optional mixed sampling through
/// a dominating proposal kernel and optional per-node stepsize counters for
/// fully asynchronous operation.
pub struct PfGossip {
    rowsums: Vec<f64>,
    kernel: StochasticMatrix,
    proposal: Option<StochasticMatrix>,
    alpha: Vec<f64>,
    update: PfUpdate,
    xbar_mode: XbarMode,
    fast: Option<Vec<f64>>,
    per_node_steps: bool,
    nu: Vec<u64>,
    lambda: f64,
    qstar: Vec<f64>,
}

impl PfGossip {
    pub fn new(
        q: &NonnegativeMatrix,
        alpha: Vec<f64>,
        update: PfUpdate,
        xbar_mode: XbarMode,
        per_node_steps: bool,
    ) -> Result<Self, SpectralError> {
        let d = q.dim();
        if alpha.len() != d || alpha.iter().any(|&a| a <= 0.0) {
            return Err(SpectralError::BadWeights);
        }
        let (lambda, qstar) = perron_target(q, &alpha)?;
        let (rowsums, kernel) = decompose(q);
        Ok(Self {
            rowsums,
            kernel,
            proposal: None,
            alpha,
            update,
            xbar_mode,
            fast: None,
            per_node_steps,
            nu: vec![0; d],
            lambda,
            qstar,
        })
    }

    /// Sample through `proposal` instead of the kernel, correcting with the
    /// one-step likelihood `p(i,j) / proposal(i,j)`. The proposal must
    /// dominate the kernel on its support.
    pub fn with_proposal(mut self, proposal: StochasticMatrix) -> Result<Self, SpectralError> {
        let d = self.kernel.dim();
        if proposal.dim() != d {
            return Err(SpectralError::Net(NetError::DimensionMismatch {
                expected: d,
                got: proposal.dim(),
            }));
        }
        for i in 0..d {
            for j in 0..d {
                if self.kernel.entry(i, j) > 0.0 && proposal.entry(i, j) <= 0.0 {
                    return Err(SpectralError::ProposalSupport { i, j });
                }
            }
        }
        self.proposal = Some(proposal);
        Ok(self)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn qstar(&self) -> &[f64] {
        &self.qstar
    }

    /// Total component updates executed so far (`sum_i nu(i, n)`).
    pub fn total_updates(&self) -> u64 {
        self.nu.iter().sum()
    }
}

impl GossipAlgorithm for PfGossip {
    fn dim(&self) -> usize {
        self.kernel.dim()
    }

    fn target(&self) -> Vec<f64> {
        self.qstar.clone()
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        vec!["lambda_est"]
    }

    fn step(
        &mut self,
        x: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let old = x.to_vec();
        let xbar_exact = dot(&self.alpha, &old);
        if xbar_exact <= 0.0 {
            return Err(StepError::ZeroVector { context: "alpha-weighted mean" });
        }
        if let XbarMode::FastSurrogate { stepsize_ratio } = self.xbar_mode {
            let fast = self.fast.get_or_insert_with(|| vec![xbar_exact; old.len()]);
            let b = (stepsize_ratio * ctx.stepsize).min(1.0);
            let total: f64 = self.alpha.iter().sum();
            for f in fast.iter_mut() {
                let z = sample_weights(&self.alpha, total, rng.random());
                *f += b * (old[z] - *f);
            }
        }
        for u in ctx.updates {
            let i = u.node;
            let a = if self.per_node_steps { ctx.schedule.at(self.nu[i]) } else { ctx.stepsize };
            self.nu[i] += 1;
            let (xi, likelihood) = match (&self.proposal, u.forced_neighbor) {
                (_, Some(j)) => {
                    if self.kernel.entry(i, j) <= 0.0 {
                        return Err(StepError::SupportViolation { node: i, sampled: j });
                    }
                    (j, 1.0)
                }
                (Some(prop), None) => {
                    let j = prop.sample_row(i, rng.random());
                    (j, self.kernel.entry(i, j) / prop.entry(i, j))
                }
                (None, None) => (self.kernel.sample_row(i, rng.random()), 1.0),
            };
            let w = ctx.noise.sample(rng);
            let pulled = old[xi] + w;
            let xbar = match (&self.xbar_mode, &self.fast) {
                (XbarMode::Exact, _) => xbar_exact,
                (XbarMode::FastSurrogate { .. }, Some(fast)) => fast[i],
                (XbarMode::FastSurrogate { .. }, None) => xbar_exact,
            };
            if xbar <= 0.0 {
                return Err(StepError::ZeroVector { context: "fast xbar surrogate" });
            }
            let rowsum = self.rowsums[i];
            let value = match self.update {
                PfUpdate::Standard => (1.0 - a) * old[i] + a * rowsum * likelihood * pulled / xbar,
                PfUpdate::AltNormalization => {
                    old[i] + a * (rowsum * likelihood * pulled - xbar * old[i])
                }
            };
            if value <= 0.0 {
                return Err(StepError::NonPositive { node: i });
            }
            x[i] = value;
        }
        Ok(())
    }

    fn extras(&mut self, x: &[f64], _z: &[f64]) -> Vec<f64> {
        vec![dot(&self.alpha, x)]
    }
}

/// Push-based variant: each activated node pushes its value to one sampled
/// target; every component decays each tick and receivers add the summed
/// contributions. The drift matches the pull scheme on `Q = P^T`.
pub struct PfPush {
    push_kernel: StochasticMatrix,
    alpha: Vec<f64>,
    lambda: f64,
    qstar: Vec<f64>,
}

impl PfPush {
    pub fn new(push_kernel: StochasticMatrix, alpha: Vec<f64>) -> Result<Self, SpectralError> {
        let d = push_kernel.dim();
        if alpha.len() != d || alpha.iter().any(|&a| a <= 0.0) {
            return Err(SpectralError::BadWeights);
        }
        let qt = NonnegativeMatrix::from_matrix(push_kernel.matrix().transpose())?;
        let (lambda, qstar) = perron_target(&qt, &alpha)?;
        Ok(Self { push_kernel, alpha, lambda, qstar })
    }

    pub fn qstar(&self) -> &[f64] {
        &self.qstar
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl GossipAlgorithm for PfPush {
    fn dim(&self) -> usize {
        self.push_kernel.dim()
    }

    fn target(&self) -> Vec<f64> {
        self.qstar.clone()
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        vec!["lambda_est"]
    }

    fn step(
        &mut self,
        x: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let old = x.to_vec();
        let xbar = dot(&self.alpha, &old);
        if xbar <= 0.0 {
            return Err(StepError::ZeroVector { context: "alpha-weighted mean" });
        }
        let a = ctx.stepsize;
        let mut incoming = vec![0.0; old.len()];
        for u in ctx.updates {
            let i = u.node;
            let j = match u.forced_neighbor {
                Some(j) => {
                    if self.push_kernel.entry(i, j) <= 0.0 {
                        return Err(StepError::SupportViolation { node: i, sampled: j });
                    }
                    j
                }
                None => self.push_kernel.sample_row(i, rng.random()),
            };
            incoming[j] += old[i];
        }
        for (j, value) in x.iter_mut().enumerate() {
            *value = old[j] + a * (incoming[j] / xbar - old[j]);
            if *value <= 0.0 {
                return Err(StepError::NonPositive { node: j });
            }
        }
        Ok(())
    }

    fn extras(&mut self, x: &[f64], _z: &[f64]) -> Vec<f64> {
        vec![dot(&self.alpha, x)]
    }
}

/// Gibbs sampling matrix for distributed argmin: off-diagonal entries
/// `(1/N) exp(-(psi_j - psi_i)^+ / temperature)` on symmetric N-regular
/// neighborhoods, diagonal absorbing the remainder. Its stationary
/// distribution is proportional to `exp(-psi_i / temperature)`.
pub fn gibbs_matrix(
    psi: &[f64],
    neighborhoods: &[Vec<usize>],
    temperature: f64,
) -> Result<StochasticMatrix, SpectralError> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(SpectralError::BadTemperature(temperature));
    }
    let d = psi.len();
    if neighborhoods.len() != d {
        return Err(SpectralError::Net(NetError::DimensionMismatch {
            expected: d,
            got: neighborhoods.len(),
        }));
    }
    let n_size = neighborhoods[0].len();
    for (i, nbrs) in neighborhoods.iter().enumerate() {
        if nbrs.len() != n_size {
            return Err(SpectralError::NeighborhoodSize {
                node: i,
                expected: n_size,
                got: nbrs.len(),
            });
        }
        for &j in nbrs {
            if j >= d {
                return Err(SpectralError::Net(NetError::EdgeOutOfBounds { i, j, d }));
            }
            if !neighborhoods[j].contains(&i) {
                return Err(SpectralError::AsymmetricNeighborhoods { i, j });
            }
        }
    }
    let mut rows = vec![vec![0.0; d]; d];
    for i in 0..d {
        let mut off_sum = 0.0;
        for &j in &neighborhoods[i] {
            let gap = (psi[j] - psi[i]).max(0.0);
            let p = (-gap / temperature).exp() / n_size as f64;
            rows[i][j] = p;
            off_sum += p;
        }
        rows[i][i] = (1.0 - off_sum).max(0.0);
    }
    Ok(StochasticMatrix::from_rows(&rows)?)
}

/// PageRank-form gossip: the ranked matrix is `(1 - eps) * Ptilde^T + eps J`
/// with `J = (1/d) 1 1^T`. The teleport term enters deterministically; only
/// the sparse transpose part is sampled.
pub struct PageRankGossip {
    /// Rows of `Ptilde^T` (in-weights), possibly zero for source nodes.
    qt_rows: Vec<Vec<f64>>,
    qt_rowsums: Vec<f64>,
    epsilon: f64,
    qstar: Vec<f64>,
}

impl PageRankGossip {
    pub fn new(ptilde: StochasticMatrix, epsilon: f64) -> Result<Self, SpectralError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(SpectralError::BadEpsilon(epsilon));
        }
        let d = ptilde.dim();
        // Dense ranked matrix (1-eps) Ptilde + eps J, transposed for the oracle.
        let j = DMatrix::<f64>::from_element(d, d, 1.0 / d as f64);
        let google = ptilde.matrix() * (1.0 - epsilon) + j * epsilon;
        let qt = NonnegativeMatrix::from_matrix(google.transpose())?;
        let ones = vec![1.0; d];
        let (_, qstar) = perron_target(&qt, &ones)?;
        let qt_rows: Vec<Vec<f64>> =
            (0..d).map(|i| (0..d).map(|j| ptilde.entry(j, i)).collect()).collect();
        let qt_rowsums = qt_rows.iter().map(|r| r.iter().sum()).collect();
        Ok(Self { qt_rows, qt_rowsums, epsilon, qstar })
    }

    /// The dense PageRank vector (stationary distribution of the ranked
    /// chain), which the iterates converge to.
    pub fn pagerank(&self) -> &[f64] {
        &self.qstar
    }
}

impl GossipAlgorithm for PageRankGossip {
    fn dim(&self) -> usize {
        self.qt_rows.len()
    }

    fn target(&self) -> Vec<f64> {
        self.qstar.clone()
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        vec!["mass"]
    }

    fn step(
        &mut self,
        x: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let d = self.qt_rows.len();
        let old = x.to_vec();
        let xbar: f64 = old.iter().sum();
        if xbar <= 0.0 {
            return Err(StepError::ZeroVector { context: "total mass" });
        }
        let a = ctx.stepsize;
        for u in ctx.updates {
            let i = u.node;
            let sampled = if self.qt_rowsums[i] > 0.0 {
                let xi = sample_weights(&self.qt_rows[i], self.qt_rowsums[i], rng.random());
                self.qt_rowsums[i] * old[xi]
            } else {
                0.0
            };
            let w = ctx.noise.sample(rng);
            x[i] = old[i]
                + a * ((1.0 - self.epsilon) * sampled / xbar + self.epsilon / d as f64 - old[i]
                    + w);
        }
        Ok(())
    }

    fn extras(&mut self, x: &[f64], _z: &[f64]) -> Vec<f64> {
        vec![x.iter().sum()]
    }
}

/// Two-stage alternation converging to the principal eigenvector of
/// `A^T A` (authority scores): the first stage pulls through rows of `A`,
/// the second through rows of `A^T`.
pub struct HitsGossip {
    rowsums_a: Vec<f64>,
    kernel_a: StochasticMatrix,
    rowsums_at: Vec<f64>,
    kernel_at: StochasticMatrix,
    alpha: Vec<f64>,
    lambda: f64,
    qstar: Vec<f64>,
}

impl HitsGossip {
    pub fn new(adjacency: &NonnegativeMatrix) -> Result<Self, SpectralError> {
        let d = adjacency.dim();
        let (rowsums_a, kernel_a) = decompose(adjacency);
        // Zero-degree nodes in either direction are construction errors here.
        let at = NonnegativeMatrix::from_matrix(adjacency.matrix().transpose())?;
        let (rowsums_at, kernel_at) = decompose(&at);
        let ata = NonnegativeMatrix::from_matrix(at.matrix() * adjacency.matrix())?;
        let alpha = vec![1.0 / d as f64; d];
        let (lambda, qstar) = perron_target(&ata, &alpha)?;
        Ok(Self { rowsums_a, kernel_a, rowsums_at, kernel_at, alpha, lambda, qstar })
    }

    pub fn qstar(&self) -> &[f64] {
        &self.qstar
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl GossipAlgorithm for HitsGossip {
    fn dim(&self) -> usize {
        self.kernel_a.dim()
    }

    fn target(&self) -> Vec<f64> {
        self.qstar.clone()
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        vec!["lambda_est"]
    }

    fn step(
        &mut self,
        x: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let d = self.kernel_a.dim();
        let old = x.to_vec();
        let xbar = dot(&self.alpha, &old);
        if xbar <= 0.0 {
            return Err(StepError::ZeroVector { context: "alpha-weighted mean" });
        }
        // First stage for every node: the second stage may pull any y_j.
        let mut y = vec![0.0; d];
        for (j, yj) in y.iter_mut().enumerate() {
            let xi1 = self.kernel_a.sample_row(j, rng.random());
            *yj = self.rowsums_a[j] * old[xi1];
        }
        let a = ctx.stepsize;
        for u in ctx.updates {
            let i = u.node;
            let xi2 = self.kernel_at.sample_row(i, rng.random());
            let value = old[i] + a * (self.rowsums_at[i] * y[xi2] / xbar - old[i]);
            if value <= 0.0 {
                return Err(StepError::NonPositive { node: i });
            }
            x[i] = value;
        }
        Ok(())
    }

    fn extras(&mut self, x: &[f64], _z: &[f64]) -> Vec<f64> {
        vec![dot(&self.alpha, x)]
    }
}

/// Integer ratings on a 1-10 scale, uniform around a per-pair mean.
#[derive(Debug, Clone)]
pub struct RatingModel {
    means: DMatrix<f64>,
    spread: u32,
}

impl RatingModel {
    /// `means` must lie in [1, 10] wherever positive; zero entries mark
    /// pairs that are never polled.
    pub fn new(means: DMatrix<f64>, spread: u32) -> Result<Self, SpectralError> {
        for i in 0..means.nrows() {
            for j in 0..means.ncols() {
                let m = means[(i, j)];
                if m != 0.0 && !(1.0..=10.0).contains(&m) {
                    return Err(SpectralError::BadRatingMean { i, j, value: m });
                }
            }
        }
        Ok(Self { means, spread })
    }

    fn range(&self, i: usize, j: usize) -> (i64, i64) {
        let center = self.means[(i, j)].round() as i64;
        let lo = (center - self.spread as i64).max(1);
        let hi = (center + self.spread as i64).min(10);
        (lo, hi)
    }

    pub fn sample(&self, i: usize, j: usize, rng: &mut ChaCha8Rng) -> f64 {
        let (lo, hi) = self.range(i, j);
        rng.random_range(lo..=hi) as f64
    }

    /// Exact mean of the sampler, entry by entry: the oracle rating matrix.
    pub fn exact_mean(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = self.range(i, j);
        (lo + hi) as f64 / 2.0
    }
}

/// Reputation gossip: one poller at a time rates a sampled peer; the
/// likelihood adjustment `rating / p(i,j)` makes the drift track the mean
/// rating matrix weighted by relative node activity.
pub struct ReputationGossip {
    polls: StochasticMatrix,
    ratings: RatingModel,
    /// Probability that node `i` is the active poller on a tick.
    activity: Vec<f64>,
    alpha: Vec<f64>,
    lambda: f64,
    qstar: Vec<f64>,
}

impl ReputationGossip {
    pub fn new(
        polls: StochasticMatrix,
        ratings: RatingModel,
        activity: Vec<f64>,
    ) -> Result<Self, SpectralError> {
        let d = polls.dim();
        if activity.len() != d || activity.iter().any(|&v| v <= 0.0) {
            return Err(SpectralError::BadActivity);
        }
        let total: f64 = activity.iter().sum();
        let activity: Vec<f64> = activity.iter().map(|v| v / total).collect();
        // Mean drift matrix: diag(activity) * exact mean ratings.
        let mut drift = DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                if polls.entry(i, j) > 0.0 {
                    drift[(i, j)] = activity[i] * ratings.exact_mean(i, j);
                }
            }
        }
        let drift = NonnegativeMatrix::from_matrix(drift)?;
        let alpha = vec![1.0 / d as f64; d];
        let (lambda, qstar) = perron_target(&drift, &alpha)?;
        Ok(Self { polls, ratings, activity, alpha, lambda, qstar })
    }

    pub fn qstar(&self) -> &[f64] {
        &self.qstar
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Normalized per-tick poll probabilities.
    pub fn activity(&self) -> &[f64] {
        &self.activity
    }
}

impl GossipAlgorithm for ReputationGossip {
    fn dim(&self) -> usize {
        self.polls.dim()
    }

    fn target(&self) -> Vec<f64> {
        self.qstar.clone()
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        vec!["lambda_est"]
    }

    fn step(
        &mut self,
        x: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let old = x.to_vec();
        let xbar = dot(&self.alpha, &old);
        if xbar <= 0.0 {
            return Err(StepError::ZeroVector { context: "alpha-weighted mean" });
        }
        let a = ctx.stepsize;
        // Pollers pull a rated value; every component decays each tick.
        let mut pulled = vec![0.0; old.len()];
        for u in ctx.updates {
            let i = u.node;
            let j = match u.forced_neighbor {
                Some(j) if self.polls.entry(i, j) > 0.0 => j,
                Some(j) => return Err(StepError::SupportViolation { node: i, sampled: j }),
                None => self.polls.sample_row(i, rng.random()),
            };
            let rating = self.ratings.sample(i, j, rng);
            let likelihood = rating / self.polls.entry(i, j);
            pulled[i] += likelihood * old[j];
        }
        for (i, value) in x.iter_mut().enumerate() {
            *value = old[i] + a * (pulled[i] / xbar - old[i]);
            if *value <= 0.0 {
                return Err(StepError::NonPositive { node: i });
            }
        }
        Ok(())
    }

    fn extras(&mut self, x: &[f64], _z: &[f64]) -> Vec<f64> {
        vec![dot(&self.alpha, x)]
    }
}
