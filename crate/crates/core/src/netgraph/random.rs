//! Random network generation.

use super::{Graph, NetError, StochasticMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How an Erdos-Renyi sample was obtained. Disconnected samples are rejected
/// and regenerated with an incremented seed, which this records.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ErdosRenyiMeta {
    pub requested_seed: u64,
    pub used_seed: u64,
    pub retries: u32,
}

const MAX_ATTEMPTS: u32 = 1000;

/// Sample an undirected Erdos-Renyi graph with i.i.d. edge probability
/// `p_edge`, put independent uniform [0,1) weights on the edges (symmetric),
/// and row-normalize the weight matrix into a stochastic matrix.
///
/// Regeneration with the same `(d, p_edge, seed)` is bit-identical.
pub fn erdos_renyi_model(
    d: usize,
    p_edge: f64,
    seed: u64,
) -> Result<(Graph, StochasticMatrix, ErdosRenyiMeta), NetError> {
    if d < 2 {
        return Err(NetError::EmptyDimension);
    }
    if !(p_edge > 0.0 && p_edge <= 1.0) {
        return Err(NetError::BadEdgeProbability(p_edge));
    }

    for attempt in 0..MAX_ATTEMPTS {
        let used_seed = seed.wrapping_add(attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(used_seed);
        let mut weights = DMatrix::<f64>::zeros(d, d);
        let mut edges = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                if rng.random::<f64>() < p_edge {
                    let w: f64 = rng.random();
                    weights[(i, j)] = w;
                    weights[(j, i)] = w;
                    edges.push((i, j));
                    edges.push((j, i));
                }
            }
        }
        let graph = Graph::new(d, edges)?;
        if !graph.is_connected_undirected() {
            continue;
        }
        let rows: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let sum: f64 = weights.row(i).iter().sum();
                (0..d).map(|j| weights[(i, j)] / sum).collect()
            })
            .collect();
        let p = StochasticMatrix::from_rows(&rows)?;
        let meta = ErdosRenyiMeta { requested_seed: seed, used_seed, retries: attempt };
        return Ok((graph, p, meta));
    }
    Err(NetError::DisconnectedSample { attempts: MAX_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_when_p_is_one() {
        let (g, p, meta) = erdos_renyi_model(6, 1.0, 3).unwrap();
        assert_eq!(g.edge_count(), 6 * 5);
        assert_eq!(meta.retries, 0);
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert!(p.entry(i, j) > 0.0);
                } else {
                    assert_eq!(p.entry(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (g1, p1, m1) = erdos_renyi_model(30, 0.2, 42).unwrap();
        let (g2, p2, m2) = erdos_renyi_model(30, 0.2, 42).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(p1, p2);
        assert_eq!(m1, m2);
    }

    #[test]
    fn expected_edge_count_at_scale() {
        // d = 100, p = 0.2: mean undirected edge count over 50 seeds should
        // land within 10% of 0.2 * C(100, 2) = 990.
        let mut total = 0usize;
        for seed in 0..50 {
            let (g, _, _) = erdos_renyi_model(100, 0.2, seed).unwrap();
            total += g.edge_count() / 2;
        }
        let mean = total as f64 / 50.0;
        assert!((mean - 990.0).abs() < 99.0, "mean edge count {mean}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(erdos_renyi_model(1, 0.5, 0).is_err());
        assert!(erdos_renyi_model(5, 0.0, 0).is_err());
        assert!(erdos_renyi_model(5, 1.5, 0).is_err());
    }
}
