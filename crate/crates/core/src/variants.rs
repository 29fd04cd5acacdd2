//! Sampling-level modifications of the pull schemes: two-hop polling that
//! preserves the stationary distribution, and conditional importance
//! sampling with a likelihood-ratio correction.

use crate::algo::{NodeUpdate, StepError};
use crate::netgraph::{NetError, StochasticMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Two-hop pulls can serve stored (stale) copies or resolve to fresh values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StalenessMode {
    /// Zero staleness: a two-hop pull reads the current value of the
    /// resolved endpoint, distributionally identical to sampling from
    /// `alpha*P + (1-alpha)*P^2`.
    Fresh,
    /// Node `j` serves its stored copy of `k`, refreshed only when `j`
    /// itself pulls from `k`.
    StoredOneRound,
}

/// Mixture `alpha*P + (1-alpha)*P^2`. Row-stochastic, same stationary
/// distribution as `P`, and a strictly better second eigenvalue for
/// `0 < alpha < 1`.
pub fn multihop_matrix(p: &StochasticMatrix, alpha: f64) -> Result<StochasticMatrix, NetError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(NetError::BadEdgeProbability(alpha));
    }
    let m = p.matrix();
    let mixed = m * alpha + m * m * (1.0 - alpha);
    // Rows sum to alpha + (1 - alpha) up to rounding; renormalize the dust.
    let d = p.dim();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let sum: f64 = mixed.row(i).iter().sum();
            (0..d).map(|j| mixed[(i, j)] / sum).collect()
        })
        .collect();
    StochasticMatrix::from_rows(&rows)
}

/// Row-wise square-root weighting: the polling matrix minimizing
/// `sum_ij p(i,j)/q(i,j)` over row-stochastic matrices with matching support.
pub fn optimal_importance_matrix(p: &StochasticMatrix) -> StochasticMatrix {
    let d = p.dim();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let norm: f64 = (0..d).map(|j| p.entry(i, j).sqrt()).sum();
            (0..d).map(|j| p.entry(i, j).sqrt() / norm).collect()
        })
        .collect();
    StochasticMatrix::from_rows(&rows).expect("square-root weighting keeps rows stochastic")
}

/// Importance-corrected pull update:
/// `(1 - a) x_i + a * likelihood * (x_xi + w)`.
pub fn importance_pull_step(i: usize, x: &[f64], xi: usize, a: f64, likelihood: f64, w: f64) -> f64 {
    (1.0 - a) * x[i] + a * likelihood * (x[xi] + w)
}

/// How a scheme's pull of a neighbor value is realized.
///
/// `pull` returns `(value, weight)`: the value read (possibly stale for
/// stored two-hop pulls) and the likelihood-ratio weight to apply (1 except
/// under importance sampling).
#[derive(Debug, Clone)]
pub enum NeighborSampler {
    Plain {
        p: StochasticMatrix,
    },
    TwoHop {
        p: StochasticMatrix,
        alpha: f64,
        mode: StalenessMode,
        stored: Vec<Vec<Option<f64>>>,
        cold_starts: u64,
    },
    Importance {
        p: StochasticMatrix,
        q: StochasticMatrix,
    },
}

impl NeighborSampler {
    pub fn plain(p: StochasticMatrix) -> Self {
        NeighborSampler::Plain { p }
    }

    pub fn two_hop(p: StochasticMatrix, alpha: f64, mode: StalenessMode) -> Result<Self, NetError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(NetError::BadEdgeProbability(alpha));
        }
        let d = p.dim();
        Ok(NeighborSampler::TwoHop {
            p,
            alpha,
            mode,
            stored: vec![vec![None; d]; d],
            cold_starts: 0,
        })
    }

    /// Importance sampling with polling matrix `q`; supports must match:
    /// `q(i,j) > 0  iff  p(i,j) > 0`.
    pub fn importance(p: StochasticMatrix, q: StochasticMatrix) -> Result<Self, NetError> {
        if p.dim() != q.dim() {
            return Err(NetError::DimensionMismatch { expected: p.dim(), got: q.dim() });
        }
        for i in 0..p.dim() {
            for j in 0..p.dim() {
                if (p.entry(i, j) > 0.0) != (q.entry(i, j) > 0.0) {
                    return Err(NetError::NegativeEntry { row: i, col: j, value: q.entry(i, j) });
                }
            }
        }
        Ok(NeighborSampler::Importance { p, q })
    }

    pub fn dim(&self) -> usize {
        match self {
            NeighborSampler::Plain { p } => p.dim(),
            NeighborSampler::TwoHop { p, .. } => p.dim(),
            NeighborSampler::Importance { p, .. } => p.dim(),
        }
    }

    pub fn base_matrix(&self) -> &StochasticMatrix {
        match self {
            NeighborSampler::Plain { p } => p,
            NeighborSampler::TwoHop { p, .. } => p,
            NeighborSampler::Importance { p, .. } => p,
        }
    }

    /// The matrix governing the mean drift of pulls through this sampler.
    pub fn effective_matrix(&self) -> Result<StochasticMatrix, NetError> {
        match self {
            NeighborSampler::Plain { p } => Ok(p.clone()),
            NeighborSampler::TwoHop { p, alpha, .. } => multihop_matrix(p, *alpha),
            // The likelihood correction makes the drift that of `p` itself.
            NeighborSampler::Importance { p, .. } => Ok(p.clone()),
        }
    }

    /// Number of two-hop pulls served fresh because no stored copy existed.
    pub fn cold_starts(&self) -> u64 {
        match self {
            NeighborSampler::TwoHop { cold_starts, .. } => *cold_starts,
            _ => 0,
        }
    }

    pub fn pull(
        &mut self,
        update: NodeUpdate,
        x: &[f64],
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, f64), StepError> {
        let i = update.node;
        // Externally decided partner (CSMA link activation): direct read.
        if let Some(j) = update.forced_neighbor {
            if self.base_matrix().entry(i, j) <= 0.0 {
                return Err(StepError::SupportViolation { node: i, sampled: j });
            }
            return Ok((x[j], 1.0));
        }
        match self {
            NeighborSampler::Plain { p } => {
                let j = p.sample_row(i, rng.random());
                Ok((x[j], 1.0))
            }
            NeighborSampler::TwoHop { p, alpha, mode, stored, cold_starts } => {
                let j = p.sample_row(i, rng.random());
                if rng.random::<f64>() < *alpha {
                    // Single hop: fresh value, and i refreshes its copy of j.
                    stored[i][j] = Some(x[j]);
                    Ok((x[j], 1.0))
                } else {
                    let k = p.sample_row(j, rng.random());
                    match mode {
                        StalenessMode::Fresh => Ok((x[k], 1.0)),
                        StalenessMode::StoredOneRound => match stored[j][k] {
                            Some(v) => Ok((v, 1.0)),
                            None => {
                                *cold_starts += 1;
                                Ok((x[k], 1.0))
                            }
                        },
                    }
                }
            }
            NeighborSampler::Importance { p, q } => {
                let j = q.sample_row(i, rng.random());
                let num = p.entry(i, j);
                let den = q.entry(i, j);
                if den <= 0.0 {
                    return Err(StepError::SupportViolation { node: i, sampled: j });
                }
                Ok((x[j], num / den))
            }
        }
    }
}
