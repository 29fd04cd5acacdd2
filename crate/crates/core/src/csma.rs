//! CSMA/CA activation layer: feasible link sets, the continuous-time
//! activation Markov chain with rates derived from Lagrange multipliers,
//! stochastic-gradient multiplier learning, and an entropy-program oracle.
//!
//! Links are ordered pairs `(i, j)` meaning "node i pulls from node j". The
//! chain activates an inactive link `l` at rate `exp(zeta_l - c_i)` (with
//! `c_i` the poll-weighted multiplier sum at the source node) whenever the
//! enlarged set stays feasible, and deactivates each active link at rate 1.
//! For frozen multipliers the chain is reversible with the product-form
//! stationary distribution computed by [`stationary_phi`].

use crate::algo::NodeUpdate;
use crate::engine::{RngStream, StepSchedule};
use crate::netgraph::{NetError, StochasticMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsmaError {
    #[error("link index {0} out of range")]
    BadLink(usize),
    #[error("link ({i}, {j}) is outside the support of the sampling matrix")]
    UnsupportedLink { i: usize, j: usize },
    #[error("feasible family must contain the empty set")]
    MissingEmptySet,
    #[error("family is not closed under subset removal")]
    NotDownwardClosed,
    #[error("feasible family exceeds the enumeration limit {limit}")]
    TooLarge { limit: usize },
    #[error("multiplier vector has {got} entries, expected {expected}")]
    ZetaDimension { expected: usize, got: usize },
    #[error("entropy program stalled at residual {achieved} (target {target}) after {iterations} iterations; constraints may be infeasible")]
    NoConvergence { target: f64, achieved: f64, iterations: usize },
    #[error("simulation horizon must be positive")]
    BadHorizon,
    #[error("{what} were not tracked for this run")]
    NotTracked { what: &'static str },
    #[error("block count must be at least 1")]
    NoBlocks,
    #[error("event budget {0} exhausted before the horizon")]
    EventBudget(usize),
    #[error(transparent)]
    Net(#[from] NetError),
}

const ENUMERATION_LIMIT: usize = 100_000;
const RATE_EXPONENT_CAP: f64 = 50.0;

/// The family of link subsets that may be concurrently active: downward
/// closed and containing the empty set. Either derived from a symmetric
/// conflict relation (feasible = conflict-free) or supplied explicitly.
#[derive(Debug, Clone)]
pub struct ActivationFamily {
    links: Vec<(usize, usize)>,
    feasibility: Feasibility,
}

#[derive(Debug, Clone)]
enum Feasibility {
    Conflicts { pairs: BTreeSet<(usize, usize)> },
    Explicit { sets: BTreeSet<Vec<usize>> },
}

impl ActivationFamily {
    /// Feasible sets are the conflict-free subsets of `links` under a
    /// symmetric conflict relation on link indices.
    pub fn from_conflicts(
        links: Vec<(usize, usize)>,
        conflicts: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CsmaError> {
        let mut pairs = BTreeSet::new();
        for (a, b) in conflicts {
            if a >= links.len() {
                return Err(CsmaError::BadLink(a));
            }
            if b >= links.len() {
                return Err(CsmaError::BadLink(b));
            }
            if a != b {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
        Ok(Self { links, feasibility: Feasibility::Conflicts { pairs } })
    }

    /// Radio-style constraint: two links conflict whenever they share an
    /// endpoint.
    pub fn node_exclusive(links: Vec<(usize, usize)>) -> Self {
        let mut pairs = BTreeSet::new();
        for a in 0..links.len() {
            for b in (a + 1)..links.len() {
                let (ai, aj) = links[a];
                let (bi, bj) = links[b];
                if ai == bi || ai == bj || aj == bi || aj == bj {
                    pairs.insert((a, b));
                }
            }
        }
        Self { links, feasibility: Feasibility::Conflicts { pairs } }
    }

    /// Explicitly listed feasible sets (validated).
    pub fn explicit(
        links: Vec<(usize, usize)>,
        sets: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, CsmaError> {
        let mut canon = BTreeSet::new();
        for mut s in sets {
            s.sort_unstable();
            s.dedup();
            for &l in &s {
                if l >= links.len() {
                    return Err(CsmaError::BadLink(l));
                }
            }
            canon.insert(s);
        }
        if !canon.contains(&Vec::new()) {
            return Err(CsmaError::MissingEmptySet);
        }
        for s in &canon {
            for drop_idx in 0..s.len() {
                let mut smaller = s.clone();
                smaller.remove(drop_idx);
                if !canon.contains(&smaller) {
                    return Err(CsmaError::NotDownwardClosed);
                }
            }
        }
        Ok(Self { links, feasibility: Feasibility::Explicit { sets: canon } })
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    fn can_add(&self, active: &BTreeSet<usize>, l: usize) -> bool {
        match &self.feasibility {
            Feasibility::Conflicts { pairs } => active
                .iter()
                .all(|&m| !pairs.contains(&(l.min(m), l.max(m)))),
            Feasibility::Explicit { sets } => {
                let mut s: Vec<usize> = active.iter().copied().collect();
                s.push(l);
                s.sort_unstable();
                sets.contains(&s)
            }
        }
    }

    pub fn is_feasible(&self, set: &BTreeSet<usize>) -> bool {
        match &self.feasibility {
            Feasibility::Conflicts { pairs } => {
                let v: Vec<usize> = set.iter().copied().collect();
                for a in 0..v.len() {
                    for b in (a + 1)..v.len() {
                        if pairs.contains(&(v[a], v[b])) {
                            return false;
                        }
                    }
                }
                true
            }
            Feasibility::Explicit { sets } => {
                let v: Vec<usize> = set.iter().copied().collect();
                sets.contains(&v)
            }
        }
    }

    /// All feasible sets in a deterministic order. Errors out above the
    /// enumeration limit; the simulation itself never needs this.
    pub fn enumerate(&self) -> Result<Vec<Vec<usize>>, CsmaError> {
        match &self.feasibility {
            Feasibility::Explicit { sets } => {
                if sets.len() > ENUMERATION_LIMIT {
                    return Err(CsmaError::TooLarge { limit: ENUMERATION_LIMIT });
                }
                Ok(sets.iter().cloned().collect())
            }
            Feasibility::Conflicts { .. } => {
                let mut out: Vec<Vec<usize>> = Vec::new();
                let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
                while let Some((set, from)) = stack.pop() {
                    out.push(set.clone());
                    if out.len() > ENUMERATION_LIMIT {
                        return Err(CsmaError::TooLarge { limit: ENUMERATION_LIMIT });
                    }
                    for l in from..self.links.len() {
                        let active: BTreeSet<usize> = set.iter().copied().collect();
                        if self.can_add(&active, l) {
                            let mut next = set.clone();
                            next.push(l);
                            stack.push((next, l + 1));
                        }
                    }
                }
                out.sort();
                Ok(out)
            }
        }
    }
}

/// Per-link activation rates `exp(zeta_l - sum_k p(i,k) zeta_(i,k))` for
/// `l = (i, j)`; deactivation is always at rate 1. Exponents are capped at
/// +-50, with the number of capped links reported.
#[derive(Debug, Clone)]
pub struct CsmaRates {
    pub per_link: Vec<f64>,
    pub capped: usize,
}

pub fn csma_rates(
    zeta: &[f64],
    p: &StochasticMatrix,
    family: &ActivationFamily,
) -> Result<CsmaRates, CsmaError> {
    let links = family.links();
    if zeta.len() != links.len() {
        return Err(CsmaError::ZetaDimension { expected: links.len(), got: zeta.len() });
    }
    for &(i, j) in links {
        if i >= p.dim() || j >= p.dim() || p.entry(i, j) <= 0.0 {
            return Err(CsmaError::UnsupportedLink { i, j });
        }
    }
    let node_terms = poll_weighted_multipliers(zeta, p, links);
    let mut capped = 0;
    let per_link = links
        .iter()
        .zip(zeta)
        .map(|(&(i, _), &z)| {
            let mut e = z - node_terms[i];
            if e.abs() > RATE_EXPONENT_CAP {
                capped += 1;
                e = e.clamp(-RATE_EXPONENT_CAP, RATE_EXPONENT_CAP);
            }
            e.exp()
        })
        .collect();
    Ok(CsmaRates { per_link, capped })
}

/// `c_i = sum over links (i,k) of p(i,k) zeta_(i,k)` per node.
fn poll_weighted_multipliers(zeta: &[f64], p: &StochasticMatrix, links: &[(usize, usize)]) -> Vec<f64> {
    let mut terms = vec![0.0; p.dim()];
    for (l, &(i, k)) in links.iter().enumerate() {
        terms[i] += p.entry(i, k) * zeta[l];
    }
    terms
}

/// A probability distribution over the enumerated feasible sets.
#[derive(Debug, Clone)]
pub struct PhiDistribution {
    pub sets: Vec<Vec<usize>>,
    pub probs: Vec<f64>,
}

impl PhiDistribution {
    pub fn prob_of(&self, set: &[usize]) -> f64 {
        self.sets
            .iter()
            .position(|s| s.as_slice() == set)
            .map(|idx| self.probs[idx])
            .unwrap_or(0.0)
    }

    /// Expected number of active links sourced at each node.
    pub fn mean_source_load(&self, links: &[(usize, usize)], d: usize) -> Vec<f64> {
        let mut load = vec![0.0; d];
        for (s, &prob) in self.sets.iter().zip(&self.probs) {
            for &l in s {
                load[links[l].0] += prob;
            }
        }
        load
    }

    /// Marginal activation probability per link.
    pub fn link_marginals(&self, link_count: usize) -> Vec<f64> {
        let mut marg = vec![0.0; link_count];
        for (s, &prob) in self.sets.iter().zip(&self.probs) {
            for &l in s {
                marg[l] += prob;
            }
        }
        marg
    }
}

/// Total-variation distance between two distributions over the same
/// enumerated family.
pub fn total_variation(a: &PhiDistribution, b: &PhiDistribution) -> f64 {
    debug_assert_eq!(a.sets, b.sets);
    0.5 * a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Product-form stationary distribution of the chain for frozen multipliers:
/// `phi(s) proportional to exp(sum_(i,j) in s zeta_ij - sum_i N_i(s) c_i)`.
pub fn stationary_phi(
    zeta: &[f64],
    p: &StochasticMatrix,
    family: &ActivationFamily,
) -> Result<PhiDistribution, CsmaError> {
    let links = family.links();
    if zeta.len() != links.len() {
        return Err(CsmaError::ZetaDimension { expected: links.len(), got: zeta.len() });
    }
    let node_terms = poll_weighted_multipliers(zeta, p, links);
    let sets = family.enumerate()?;
    let log_weights: Vec<f64> = sets
        .iter()
        .map(|s| s.iter().map(|&l| zeta[l] - node_terms[links[l].0]).sum())
        .collect();
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(PhiDistribution { sets, probs: weights.iter().map(|w| w / z).collect() })
}

#[derive(Debug, Clone)]
pub struct CsmaOptions {
    pub horizon_time: f64,
    pub seed: u64,
    /// Track per-set occupation times (memory grows with the number of
    /// distinct visited sets; enable for validation-scale instances only).
    pub track_occupation: bool,
    /// Keep the full on/off transition log for CSV export.
    pub track_transitions: bool,
    pub max_events: usize,
}

impl CsmaOptions {
    pub fn new(horizon_time: f64, seed: u64) -> Self {
        Self {
            horizon_time,
            seed,
            track_occupation: false,
            track_transitions: false,
            max_events: 50_000_000,
        }
    }

    pub fn with_occupation(mut self) -> Self {
        self.track_occupation = true;
        self
    }

    pub fn with_transitions(mut self) -> Self {
        self.track_transitions = true;
        self
    }
}

/// Outcome of an event-driven simulation of the activation chain.
#[derive(Debug, Clone)]
pub struct CsmaTrace {
    /// `(time, link)` for every inactive-to-active transition, in order.
    pub activation_events: Vec<(f64, usize)>,
    /// Full `(time, link, turned_on)` transition log (when tracked).
    pub transitions: Option<Vec<(f64, usize, bool)>>,
    /// Number of activations per link.
    pub link_counts: Vec<u64>,
    /// Number of activations of any link sourced at each node.
    pub node_counts: Vec<u64>,
    /// Occupation time per visited set (when tracked).
    pub occupation: Option<BTreeMap<Vec<usize>, f64>>,
    pub total_time: f64,
    pub final_set: Vec<usize>,
}

impl CsmaTrace {
    /// Empirical distribution over the enumerated family from occupation
    /// times.
    pub fn empirical_phi(&self, family: &ActivationFamily) -> Result<PhiDistribution, CsmaError> {
        let occupation = self
            .occupation
            .as_ref()
            .ok_or(CsmaError::NotTracked { what: "occupation times" })?;
        let sets = family.enumerate()?;
        let probs = sets
            .iter()
            .map(|s| occupation.get(s).copied().unwrap_or(0.0) / self.total_time)
            .collect();
        Ok(PhiDistribution { sets, probs })
    }

    /// One engine tick per activation event: the pulling node updates
    /// against the link partner.
    pub fn to_activation_feed(&self, family: &ActivationFamily) -> Vec<Vec<NodeUpdate>> {
        self.activation_events
            .iter()
            .map(|&(_, l)| {
                let (i, j) = family.links()[l];
                vec![NodeUpdate::forced(i, j)]
            })
            .collect()
    }

    /// CSV export of the transition log: `time,link,state` with `on`/`off`.
    pub fn write_transitions_csv<W: std::io::Write>(&self, out: &mut W) -> Result<(), CsmaError> {
        let transitions = self
            .transitions
            .as_ref()
            .ok_or(CsmaError::NotTracked { what: "transitions" })?;
        writeln!(out, "time,link,state").map_err(NetError::from)?;
        for &(time, link, on) in transitions {
            writeln!(out, "{time:.16e},{link},{}", if on { "on" } else { "off" })
                .map_err(NetError::from)?;
        }
        Ok(())
    }
}

/// Chain state with O(1) feasibility checks for conflict-relation families:
/// `blocked[l]` counts the active links conflicting with `l`.
struct ChainState {
    active: BTreeSet<usize>,
    time: f64,
    blocked: Vec<u32>,
    conflict_lists: Option<Vec<Vec<usize>>>,
}

impl ChainState {
    fn new(family: &ActivationFamily) -> Self {
        let n = family.link_count();
        let conflict_lists = match &family.feasibility {
            Feasibility::Conflicts { pairs } => {
                let mut lists = vec![Vec::new(); n];
                for &(a, b) in pairs {
                    lists[a].push(b);
                    lists[b].push(a);
                }
                Some(lists)
            }
            Feasibility::Explicit { .. } => None,
        };
        Self { active: BTreeSet::new(), time: 0.0, blocked: vec![0; n], conflict_lists }
    }

    fn can_add(&self, family: &ActivationFamily, l: usize) -> bool {
        if self.active.contains(&l) {
            return false;
        }
        match &self.conflict_lists {
            Some(_) => self.blocked[l] == 0,
            None => family.can_add(&self.active, l),
        }
    }

    fn set_link(&mut self, l: usize, on: bool) {
        if on {
            self.active.insert(l);
        } else {
            self.active.remove(&l);
        }
        if let Some(lists) = &self.conflict_lists {
            for &m in &lists[l] {
                if on {
                    self.blocked[m] += 1;
                } else {
                    self.blocked[m] -= 1;
                }
            }
        }
    }
}

/// Event-driven simulation with exponential clocks; feasibility is
/// maintained at every transition by construction of the candidate set.
pub fn csma_simulate(
    family: &ActivationFamily,
    rates: &[f64],
    opts: &CsmaOptions,
) -> Result<CsmaTrace, CsmaError> {
    if !opts.horizon_time.is_finite() || opts.horizon_time <= 0.0 {
        return Err(CsmaError::BadHorizon);
    }
    if rates.len() != family.link_count() {
        return Err(CsmaError::ZetaDimension { expected: family.link_count(), got: rates.len() });
    }
    let mut rng = RngStream::new(opts.seed).substream("csma", 0);
    let mut state = ChainState::new(family);
    let mut collect = Collectors::new(family, opts.track_occupation, opts.track_transitions);
    advance_chain(family, rates, &mut state, opts.horizon_time, &mut rng, &mut collect, opts.max_events)?;
    Ok(collect.finish(state))
}

struct Collectors {
    activation_events: Vec<(f64, usize)>,
    transitions: Option<Vec<(f64, usize, bool)>>,
    link_counts: Vec<u64>,
    node_counts: Vec<u64>,
    occupation: Option<BTreeMap<Vec<usize>, f64>>,
    links: Vec<(usize, usize)>,
    total_time: f64,
}

impl Collectors {
    fn new(family: &ActivationFamily, track_occupation: bool, track_transitions: bool) -> Self {
        let node_count = family
            .links()
            .iter()
            .map(|&(i, j)| i.max(j) + 1)
            .max()
            .unwrap_or(0);
        Self {
            activation_events: Vec::new(),
            transitions: track_transitions.then(Vec::new),
            link_counts: vec![0; family.link_count()],
            node_counts: vec![0; node_count],
            occupation: track_occupation.then(BTreeMap::new),
            links: family.links().to_vec(),
            total_time: 0.0,
        }
    }

    fn dwell(&mut self, active: &BTreeSet<usize>, dt: f64) {
        self.total_time += dt;
        if let Some(occ) = &mut self.occupation {
            let key: Vec<usize> = active.iter().copied().collect();
            *occ.entry(key).or_insert(0.0) += dt;
        }
    }

    fn transition(&mut self, time: f64, link: usize, on: bool) {
        if let Some(log) = &mut self.transitions {
            log.push((time, link, on));
        }
        if on {
            self.activation_events.push((time, link));
            self.link_counts[link] += 1;
            self.node_counts[self.links[link].0] += 1;
        }
    }

    fn finish(self, state: ChainState) -> CsmaTrace {
        CsmaTrace {
            activation_events: self.activation_events,
            transitions: self.transitions,
            link_counts: self.link_counts,
            node_counts: self.node_counts,
            occupation: self.occupation,
            total_time: self.total_time,
            final_set: state.active.iter().copied().collect(),
        }
    }
}

/// Advance the chain by `duration` time units, appending to the collectors.
fn advance_chain(
    family: &ActivationFamily,
    rates: &[f64],
    state: &mut ChainState,
    duration: f64,
    rng: &mut ChaCha8Rng,
    collect: &mut Collectors,
    max_events: usize,
) -> Result<(), CsmaError> {
    let deadline = state.time + duration;
    let mut events = 0usize;
    let mut feasible: Vec<usize> = Vec::with_capacity(family.link_count());
    loop {
        // Candidates: deactivate any active link (rate 1), activate any
        // inactive link whose addition stays feasible.
        let mut total_rate = state.active.len() as f64;
        feasible.clear();
        for (l, &rate) in rates.iter().enumerate() {
            if state.can_add(family, l) {
                feasible.push(l);
                total_rate += rate;
            }
        }
        if total_rate <= 0.0 {
            collect.dwell(&state.active, deadline - state.time);
            state.time = deadline;
            return Ok(());
        }
        let u: f64 = rng.random();
        let dt = -(1.0 - u).ln() / total_rate;
        if state.time + dt >= deadline {
            collect.dwell(&state.active, deadline - state.time);
            state.time = deadline;
            return Ok(());
        }
        collect.dwell(&state.active, dt);
        state.time += dt;
        events += 1;
        if events > max_events {
            return Err(CsmaError::EventBudget(max_events));
        }
        // Pick the event proportionally to its rate.
        let mut pick = rng.random::<f64>() * total_rate;
        let mut chosen: Option<(usize, bool)> = None;
        for &l in &state.active {
            pick -= 1.0;
            if pick < 0.0 {
                chosen = Some((l, false));
                break;
            }
        }
        if chosen.is_none() {
            for &l in &feasible {
                pick -= rates[l];
                if pick < 0.0 {
                    chosen = Some((l, true));
                    break;
                }
            }
        }
        let (link, turning_on) = chosen.unwrap_or_else(|| {
            // Rounding dust at the top of the range: take the last candidate.
            match feasible.last() {
                Some(&l) => (l, true),
                None => (*state.active.iter().next_back().expect("nonempty"), false),
            }
        });
        state.set_link(link, turning_on);
        collect.transition(state.time, link, turning_on);
        if turning_on {
            debug_assert!(family.is_feasible(&state.active));
        }
    }
}

/// One multiplier ascent step:
/// `zeta_l += alpha * (p(i,j) * node_count_i - link_count_l)`.
pub fn lagrange_update(
    zeta: &[f64],
    link_counts: &[u64],
    node_counts: &[u64],
    alpha: f64,
    p: &StochasticMatrix,
    family: &ActivationFamily,
    clamp_zeta: bool,
) -> Result<Vec<f64>, CsmaError> {
    let links = family.links();
    if zeta.len() != links.len() || link_counts.len() != links.len() {
        return Err(CsmaError::ZetaDimension { expected: links.len(), got: zeta.len() });
    }
    let mut out = Vec::with_capacity(zeta.len());
    for (l, &(i, j)) in links.iter().enumerate() {
        let grad = p.entry(i, j) * node_counts[i] as f64 - link_counts[l] as f64;
        let mut z = zeta[l] + alpha * grad;
        if clamp_zeta {
            z = z.max(0.0);
        }
        out.push(z);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct LearnOptions {
    pub blocks: u64,
    pub alpha: StepSchedule,
    pub seed: u64,
    pub zeta0: Option<Vec<f64>>,
    pub clamp_zeta: bool,
    /// Collect the full activation timeline for coupling to a gossip run.
    pub collect_events: bool,
}

impl LearnOptions {
    pub fn new(blocks: u64, seed: u64) -> Self {
        Self {
            blocks,
            alpha: StepSchedule::Harmonic { c: 0.05 },
            seed,
            zeta0: None,
            clamp_zeta: false,
            collect_events: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub zeta: Vec<f64>,
    /// Whole-run activation counts per link and per source node.
    pub link_counts: Vec<u64>,
    pub node_counts: Vec<u64>,
    /// Activation events across all blocks (empty unless requested).
    pub activation_events: Vec<(f64, usize)>,
    pub total_time: f64,
    pub rate_cap_hits: usize,
}

/// Stochastic-gradient ascent of the Lagrange multipliers over blocks of
/// linearly growing duration (`T_k = k`). The chain state carries across
/// blocks; rates are recomputed from the updated multipliers after each.
pub fn learn_multipliers(
    family: &ActivationFamily,
    p: &StochasticMatrix,
    opts: &LearnOptions,
) -> Result<LearnOutcome, CsmaError> {
    if opts.blocks == 0 {
        return Err(CsmaError::NoBlocks);
    }
    let nlinks = family.link_count();
    let mut zeta = match &opts.zeta0 {
        Some(z) if z.len() != nlinks => {
            return Err(CsmaError::ZetaDimension { expected: nlinks, got: z.len() })
        }
        Some(z) => z.clone(),
        None => vec![0.0; nlinks],
    };
    let mut rng = RngStream::new(opts.seed).substream("csma-learn", 0);
    let mut state = ChainState::new(family);
    let mut total = Collectors::new(family, false, false);
    let mut rate_cap_hits = 0usize;
    for block in 1..=opts.blocks {
        let rates = csma_rates(&zeta, p, family)?;
        rate_cap_hits += rates.capped;
        let mut block_collect = Collectors::new(family, false, false);
        advance_chain(
            family,
            &rates.per_link,
            &mut state,
            block as f64,
            &mut rng,
            &mut block_collect,
            usize::MAX,
        )?;
        let alpha = opts.alpha.at(block - 1);
        zeta = lagrange_update(
            &zeta,
            &block_collect.link_counts,
            &block_collect.node_counts,
            alpha,
            p,
            family,
            opts.clamp_zeta,
        )?;
        for (t, l) in block_collect.activation_events {
            if opts.collect_events {
                total.activation_events.push((t, l));
            }
            total.link_counts[l] += 1;
            total.node_counts[family.links()[l].0] += 1;
        }
        total.total_time += block_collect.total_time;
    }
    Ok(LearnOutcome {
        zeta,
        link_counts: total.link_counts,
        node_counts: total.node_counts,
        activation_events: total.activation_events,
        total_time: total.total_time,
        rate_cap_hits,
    })
}

#[derive(Debug, Clone)]
pub struct EntropySolution {
    pub phi: PhiDistribution,
    pub zeta: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

const ENTROPY_RESIDUAL: f64 = 1e-8;
const ENTROPY_MAX_ITERS: usize = 2_000_000;

/// Test-side oracle: the max-entropy distribution over the feasible family
/// whose conditional link frequencies match `p`. Solved by exact dual
/// ascent on the closed-form `phi(zeta)`, iterated until the constraint
/// residual drops below 1e-8.
pub fn solve_entropy_program(
    family: &ActivationFamily,
    p: &StochasticMatrix,
) -> Result<EntropySolution, CsmaError> {
    let links = family.links();
    let mut zeta = vec![0.0; links.len()];
    let d = p.dim();
    let step = 0.5;
    let mut residual = f64::INFINITY;
    for iter in 0..ENTROPY_MAX_ITERS {
        let phi = stationary_phi(&zeta, p, family)?;
        let marginals = phi.link_marginals(links.len());
        let load = phi.mean_source_load(links, d);
        residual = 0.0;
        for (l, &(i, j)) in links.iter().enumerate() {
            let grad = p.entry(i, j) * load[i] - marginals[l];
            residual = residual.max(grad.abs());
            zeta[l] += step * grad;
        }
        if residual < ENTROPY_RESIDUAL {
            let phi = stationary_phi(&zeta, p, family)?;
            return Ok(EntropySolution { phi, zeta, residual, iterations: iter + 1 });
        }
    }
    Err(CsmaError::NoConvergence {
        target: ENTROPY_RESIDUAL,
        achieved: residual,
        iterations: ENTROPY_MAX_ITERS,
    })
}
