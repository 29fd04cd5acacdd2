//! By-name registry of gossip schemes.
//!
//! Every scheme variant is registered here behind the common
//! [`GossipAlgorithm`] trait and built from a JSON parameter blob plus the
//! experiment's network and initial data, so runners select algorithms at
//! runtime from config. Builders own their parameter schemas; unknown
//! fields are rejected.

use super::GossipAlgorithm;
use crate::averaging::{DeterministicGossip, VanillaGossip};
use crate::netgraph::{NetError, NonnegativeMatrix, StochasticMatrix};
use crate::rvi::{Normalization, RviError, RviGossip};
use crate::spectral::{
    HitsGossip, PageRankGossip, PcaBlock, PcaStochastic, PcaStream, PfGossip, PfPush, PfUpdate,
    RatingModel, ReputationGossip, SpectralError, XbarMode,
};
use crate::variants::{optimal_importance_matrix, NeighborSampler, StalenessMode};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("unknown algorithm id '{0}'")]
    UnknownAlgorithm(String),
    #[error("algorithm '{id}' requires a network matrix")]
    MissingNetwork { id: &'static str },
    #[error("invalid parameters for '{id}': {msg}")]
    BadParams { id: &'static str, msg: String },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Rvi(#[from] RviError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Inputs shared by every builder: the experiment's network (when any), the
/// initial data vector, and the algorithm-specific JSON parameters.
pub struct BuildContext<'a> {
    pub network: Option<&'a NonnegativeMatrix>,
    pub x0: &'a [f64],
    pub params: &'a Value,
}

type BuildFn = fn(&BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError>;

pub struct AlgorithmEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub build: BuildFn,
}

static ENTRIES: &[AlgorithmEntry] = &[
    AlgorithmEntry {
        id: "deterministic",
        summary: "deterministic averaging sweep x <- Px on activated components",
        build: build_deterministic,
    },
    AlgorithmEntry {
        id: "vanilla",
        summary: "sampled pull gossip; converges to a consensus, biased under rate asymmetry",
        build: build_vanilla,
    },
    AlgorithmEntry {
        id: "rvi",
        summary: "relative-value iteration gossip; estimate converges to the stationary average",
        build: build_rvi,
    },
    AlgorithmEntry {
        id: "pf",
        summary: "normalized pull gossip for the Perron-Frobenius eigenvector of Q = DP",
        build: build_pf,
    },
    AlgorithmEntry {
        id: "pf_alt",
        summary: "Perron-Frobenius gossip with the alternative normalization drift",
        build: build_pf_alt,
    },
    AlgorithmEntry {
        id: "pf_mixed",
        summary: "Perron-Frobenius gossip sampling through a dominating proposal kernel",
        build: build_pf_mixed,
    },
    AlgorithmEntry {
        id: "pf_push",
        summary: "push-based Perron-Frobenius gossip (drift on the transpose kernel)",
        build: build_pf_push,
    },
    AlgorithmEntry {
        id: "pagerank",
        summary: "teleported ranking gossip on the transpose of a stochastic matrix",
        build: build_pagerank,
    },
    AlgorithmEntry {
        id: "hits",
        summary: "two-stage authority-score gossip converging on the A^T A eigenvector",
        build: build_hits,
    },
    AlgorithmEntry {
        id: "reputation",
        summary: "single-poller rated-recommendation gossip (activity-weighted eigenvector)",
        build: build_reputation,
    },
    AlgorithmEntry {
        id: "pca_sa",
        summary: "streaming principal-component estimation, stochastic-approximation update",
        build: build_pca_sa,
    },
    AlgorithmEntry {
        id: "pca_block",
        summary: "streaming principal-component estimation, block power method",
        build: build_pca_block,
    },
];

pub fn all() -> &'static [AlgorithmEntry] {
    ENTRIES
}

pub fn find(id: &str) -> Option<&'static AlgorithmEntry> {
    ENTRIES.iter().find(|e| e.id == id)
}

pub fn build(id: &str, ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    let entry = find(id).ok_or_else(|| BuildError::UnknownAlgorithm(id.to_string()))?;
    (entry.build)(ctx)
}

fn parse<T: DeserializeOwned + Default>(id: &'static str, v: &Value) -> Result<T, BuildError> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| BuildError::BadParams { id, msg: e.to_string() })
}

fn require_network<'a>(
    id: &'static str,
    ctx: &BuildContext<'a>,
) -> Result<&'a NonnegativeMatrix, BuildError> {
    ctx.network.ok_or(BuildError::MissingNetwork { id })
}

fn require_stochastic(id: &'static str, net: &NonnegativeMatrix) -> Result<StochasticMatrix, BuildError> {
    StochasticMatrix::from_matrix(net.matrix().clone()).map_err(|e| BuildError::BadParams {
        id,
        msg: format!("network must be row-stochastic: {e}"),
    })
}

fn matrix_from_rows(id: &'static str, rows: &[Vec<f64>]) -> Result<StochasticMatrix, BuildError> {
    StochasticMatrix::from_rows(rows)
        .map_err(|e| BuildError::BadParams { id, msg: e.to_string() })
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SamplingSpec {
    #[default]
    Plain,
    TwoHop {
        alpha: f64,
        #[serde(default = "default_staleness")]
        mode: StalenessMode,
    },
    /// Square-root-optimal polling unless an explicit matrix is given.
    Importance {
        #[serde(default)]
        q: Option<Vec<Vec<f64>>>,
    },
}

fn default_staleness() -> StalenessMode {
    StalenessMode::StoredOneRound
}

impl SamplingSpec {
    fn into_sampler(self, id: &'static str, p: StochasticMatrix) -> Result<NeighborSampler, BuildError> {
        match self {
            SamplingSpec::Plain => Ok(NeighborSampler::plain(p)),
            SamplingSpec::TwoHop { alpha, mode } => NeighborSampler::two_hop(p, alpha, mode)
                .map_err(|e| BuildError::BadParams { id, msg: e.to_string() }),
            SamplingSpec::Importance { q } => {
                let q = match q {
                    Some(rows) => matrix_from_rows(id, &rows)?,
                    None => optimal_importance_matrix(&p),
                };
                NeighborSampler::importance(p, q)
                    .map_err(|e| BuildError::BadParams { id, msg: e.to_string() })
            }
        }
    }
}

fn build_deterministic(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    #[derive(Deserialize, Default)]
    #[serde(deny_unknown_fields)]
    struct Params {}
    let _: Params = parse("deterministic", ctx.params)?;
    let p = require_stochastic("deterministic", require_network("deterministic", ctx)?)?;
    Ok(Box::new(DeterministicGossip::new(p, ctx.x0)?))
}

fn build_vanilla(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    #[derive(Deserialize, Default)]
    #[serde(deny_unknown_fields, default)]
    struct Params {
        sampling: SamplingSpec,
    }
    let params: Params = parse("vanilla", ctx.params)?;
    let p = require_stochastic("vanilla", require_network("vanilla", ctx)?)?;
    let sampler = params.sampling.into_sampler("vanilla", p)?;
    Ok(Box::new(VanillaGossip::new(sampler, ctx.x0)?))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum NormalizationSpec {
    #[default]
    Anchor,
    WeightedAverage {
        #[serde(default = "default_ratio")]
        stepsize_ratio: f64,
        #[serde(default)]
        mix: Option<Vec<Vec<f64>>>,
    },
}

fn default_ratio() -> f64 {
    10.0
}

fn build_rvi(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    #[derive(Deserialize, Default)]
    #[serde(deny_unknown_fields, default)]
    struct Params {
        anchor: usize,
        sampling: SamplingSpec,
        normalization: NormalizationSpec,
        per_node_steps: bool,
    }
    let params: Params = parse("rvi", ctx.params)?;
    let p = require_stochastic("rvi", require_network("rvi", ctx)?)?;
    let d = p.dim();
    let sampler = params.sampling.into_sampler("rvi", p)?;
    let normalization = match params.normalization {
        NormalizationSpec::Anchor => Normalization::Anchor,
        NormalizationSpec::WeightedAverage { stepsize_ratio, mix } => match mix {
            Some(rows) => Normalization::WeightedAverage {
                mix: matrix_from_rows("rvi", &rows)?,
                stepsize_ratio,
            },
            None => Normalization::uniform_weighted_average(d, stepsize_ratio),
        },
    };
    Ok(Box::new(RviGossip::new(
        sampler,
        ctx.x0.to_vec(),
        params.anchor,
        normalization,
        params.per_node_steps,
    )?))
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum XbarSpec {
    #[default]
    Exact,
    FastSurrogate {
        #[serde(default = "default_ratio")]
        stepsize_ratio: f64,
    },
}

impl XbarSpec {
    fn into_mode(self) -> XbarMode {
        match self {
            XbarSpec::Exact => XbarMode::Exact,
            XbarSpec::FastSurrogate { stepsize_ratio } => XbarMode::FastSurrogate { stepsize_ratio },
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct PfParams {
    alpha: Option<Vec<f64>>,
    xbar: XbarSpec,
    per_node_steps: bool,
    proposal: Option<Vec<Vec<f64>>>,
}

fn build_pf_common(
    id: &'static str,
    ctx: &BuildContext<'_>,
    update: PfUpdate,
    require_proposal: bool,
) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    let params: PfParams = parse(id, ctx.params)?;
    let q = require_network(id, ctx)?;
    let d = q.dim();
    let alpha = params.alpha.unwrap_or_else(|| vec![1.0 / d as f64; d]);
    let mut algo = PfGossip::new(q, alpha, update, params.xbar.into_mode(), params.per_node_steps)?;
    match (params.proposal, require_proposal) {
        (Some(rows), _) => {
            algo = algo.with_proposal(matrix_from_rows(id, &rows)?)?;
        }
        (None, true) => {
            return Err(BuildError::BadParams { id, msg: "a proposal kernel is required".into() })
        }
        (None, false) => {}
    }
    Ok(Box::new(algo))
}

fn build_pf(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    build_pf_common("pf", ctx, PfUpdate::Standard, false)
}

fn build_pf_alt(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    build_pf_common("pf_alt", ctx, PfUpdate::AltNormalization, false)
}

fn build_pf_mixed(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    build_pf_common("pf_mixed", ctx, PfUpdate::Standard, true)
}

fn build_pf_push(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    #[derive(Deserialize, Default)]
    #[serde(deny_unknown_fields, default)]
    struct Params {
        alpha: Option<Vec<f64>>,
    }
    let params: Params = parse("pf_push", ctx.params)?;
    let p = require_stochastic("pf_push", require_network("pf_push", ctx)?)?;
    let d = p.dim();
    let alpha = params.alpha.unwrap_or_else(|| vec![1.0; d]);
    Ok(Box::new(PfPush::new(p, alpha)?))
}

fn build_pagerank(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields, default)]
    struct Params {
        epsilon: f64,
    }
    impl Default for Params {
        fn default() -> Self {
            Self { epsilon: 0.15 }
        }
    }
    let params: Params = parse("pagerank", ctx.params)?;
    let p = require_stochastic("pagerank", require_network("pagerank", ctx)?)?;
    Ok(Box::new(PageRankGossip::new(p, params.epsilon)?))
}

fn build_hits(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    #[derive(Deserialize, Default)]
    #[serde(deny_unknown_fields)]
    struct Params {}
    let _: Params = parse("hits", ctx.params)?;
    let adjacency = require_network("hits", ctx)?;
    Ok(Box::new(HitsGossip::new(adjacency)?))
}

fn build_reputation(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    #[derive(Deserialize, Default)]
    #[serde(deny_unknown_fields, default)]
    struct Params {
        spread: u32,
        activity: Option<Vec<f64>>,
        polls: Option<Vec<Vec<f64>>>,
    }
    let params: Params = parse("reputation", ctx.params)?;
    let means = require_network("reputation", ctx)?;
    let d = means.dim();
    let polls = match params.polls {
        Some(rows) => matrix_from_rows("reputation", &rows)?,
        // Default polling: rate-proportional, i.e. row-normalized means.
        None => crate::spectral::decompose(means).1,
    };
    let ratings = RatingModel::new(means.matrix().clone(), params.spread)?;
    let activity = params.activity.unwrap_or_else(|| vec![1.0; d]);
    Ok(Box::new(ReputationGossip::new(polls, ratings, activity)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PcaParams {
    dim: usize,
    sigma: f64,
    direction_seed: u64,
    q: Option<Vec<f64>>,
    block: u64,
}

impl Default for PcaParams {
    fn default() -> Self {
        Self { dim: 20, sigma: 1.0, direction_seed: 0, q: None, block: 4000 }
    }
}

fn pca_stream(id: &'static str, params: &PcaParams) -> Result<PcaStream, BuildError> {
    let stream = match &params.q {
        Some(q) => PcaStream::new(q.clone(), params.sigma),
        None => PcaStream::with_random_direction(params.dim, params.sigma, params.direction_seed),
    };
    stream.map_err(|e| BuildError::BadParams { id, msg: e.to_string() })
}

fn build_pca_sa(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    let params: PcaParams = parse("pca_sa", ctx.params)?;
    Ok(Box::new(PcaStochastic::new(pca_stream("pca_sa", &params)?)))
}

fn build_pca_block(ctx: &BuildContext<'_>) -> Result<Box<dyn GossipAlgorithm>, BuildError> {
    let params: PcaParams = parse("pca_block", ctx.params)?;
    let stream = pca_stream("pca_block", &params)?;
    PcaBlock::new(stream, params.block)
        .map(|b| Box::new(b) as Box<dyn GossipAlgorithm>)
        .map_err(|e| BuildError::BadParams { id: "pca_block", msg: e.to_string() })
}
