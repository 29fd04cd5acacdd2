//! Independent oracles shared by the integration suites. Everything here is
//! deliberately implemented by a different route than the library code it
//! checks: brute-force power iterations, dense null-space solves, and grid
//! searches.

#![allow(dead_code)] // each integration target uses its own subset

use gossip_core::netgraph::{NonnegativeMatrix, StochasticMatrix};
use nalgebra::{DMatrix, DVector};

/// Stationary distribution by plain power iteration on `P^T`, run to a
/// 1e-12 sup-norm fixed-point residual.
pub fn stationary_by_power_iteration(p: &StochasticMatrix) -> Vec<f64> {
    let d = p.dim();
    let pt = p.matrix().transpose();
    let mut eta = DVector::from_element(d, 1.0 / d as f64);
    for _ in 0..1_000_000 {
        let next = &pt * &eta;
        let diff = (&next - &eta).amax();
        eta = next;
        let sum: f64 = eta.iter().sum();
        eta /= sum;
        if diff < 1e-12 {
            break;
        }
    }
    eta.iter().copied().collect()
}

/// Perron-Frobenius pair by the normalized power iteration
/// `q(n+1) = Q q(n) / (alpha^T Q q(n))`, run for 10^4 iterations.
pub fn perron_by_power_method(q: &NonnegativeMatrix, alpha: &[f64]) -> (f64, Vec<f64>) {
    let d = q.dim();
    let m = q.matrix();
    let alpha = DVector::from_column_slice(alpha);
    let mut v = DVector::from_element(d, 1.0);
    let mut lambda = 1.0;
    for _ in 0..10_000 {
        let next = m * &v;
        lambda = alpha.dot(&next);
        v = next / lambda;
    }
    // At the fixed point alpha^T v = 1 and Qv = lambda v, so lambda v has
    // alpha-weight lambda: rescale to alpha^T q* = lambda.
    (lambda, v.iter().map(|x| x * lambda).collect())
}

/// The consensus value asynchronous pull gossip is driven to under
/// per-node activation rates: `pi^T x0` where `pi` spans the left null
/// space of `diag(rates) (P - I)`, normalized to sum 1.
pub fn rate_weighted_consensus(p: &StochasticMatrix, rates: &[f64], x0: &[f64]) -> f64 {
    let d = p.dim();
    let lambda = DMatrix::from_fn(d, d, |i, j| if i == j { rates[i] } else { 0.0 });
    let gen = lambda * (p.matrix() - DMatrix::<f64>::identity(d, d));
    // pi^T gen = 0, sum pi = 1: solve gen^T pi = 0 with one row replaced.
    let mut m = gen.transpose();
    for j in 0..d {
        m[(d - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(d);
    b[d - 1] = 1.0;
    let pi = m.lu().solve(&b).expect("rate-weighted chain has a 1-dim null space");
    pi.iter().zip(x0).map(|(w, x)| w * x).sum()
}

/// Dense PageRank by straight power iteration on the Google chain
/// `G = (1 - eps) P + eps J`, to a 1e-14 residual.
pub fn pagerank_by_power_iteration(p: &StochasticMatrix, epsilon: f64) -> Vec<f64> {
    let d = p.dim();
    let mut pi = vec![1.0 / d as f64; d];
    for _ in 0..1_000_000 {
        let mut next = vec![epsilon / d as f64; d];
        for (i, &mass) in pi.iter().enumerate() {
            for (j, slot) in next.iter_mut().enumerate() {
                *slot += (1.0 - epsilon) * mass * p.entry(i, j);
            }
        }
        let diff = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        pi = next;
        if diff < 1e-14 {
            break;
        }
    }
    pi
}

/// Exhaustive search over the probability simplex at the given resolution
/// for the row minimizing `sum_j p_j / q_j`. Returns the best value found.
pub fn grid_min_inverse_weight_cost(p_row: &[f64], resolution: f64) -> f64 {
    assert_eq!(p_row.len(), 3, "grid oracle is written for 3-entry rows");
    let steps = (1.0 / resolution).round() as usize;
    let mut best = f64::INFINITY;
    for a in 1..steps {
        for b in 1..(steps - a) {
            let c = steps - a - b;
            let q = [a as f64 / steps as f64, b as f64 / steps as f64, c as f64 / steps as f64];
            let cost: f64 = p_row.iter().zip(&q).map(|(p, q)| p / q).sum();
            if cost < best {
                best = cost;
            }
        }
    }
    best
}

/// Relative sup-norm distance, used for eigenvector comparisons.
pub fn rel_sup_distance(x: &[f64], y: &[f64]) -> f64 {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / scale
}
