//! Acceptance suite: the quantitative exit gates for the whole scheme
//! family, one test per criterion. Each test prints a single PASS line;
//! a failed assertion is the corresponding FAIL. Timed criteria hold a
//! global lock so wall-clock budgets are measured without interference.

use gossip_core::averaging::{wrong_consensus_experiment, WrongConsensusConfig};
use gossip_core::csma::{
    csma_rates, csma_simulate, learn_multipliers, solve_entropy_program, stationary_phi,
    total_variation, ActivationFamily, CsmaOptions, LearnOptions,
};
use gossip_core::engine::{
    self, ActivationProcess, NoiseModel, RngStream, RunOptions, StepSchedule,
};
use gossip_core::netgraph::{
    erdos_renyi_model, second_eigenvalue_modulus, solve_poisson, stationary_distribution,
    NonnegativeMatrix, StochasticMatrix,
};
use gossip_core::rvi::{error_dynamics_matrix, expected_error_curve, Normalization, RviErrorModel, RviGossip};
use gossip_core::spectral::{
    alignment_angle, gibbs_matrix, HitsGossip, PageRankGossip, PcaBlock, PcaStochastic, PcaStream,
    PfGossip, PfUpdate, RatingModel, ReputationGossip, XbarMode,
};
use gossip_core::variants::{
    importance_pull_step, multihop_matrix, optimal_importance_matrix, NeighborSampler,
    StalenessMode,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Mutex;
use std::time::{Duration, Instant};

static TIMED: Mutex<()> = Mutex::new(());

fn two_node() -> StochasticMatrix {
    StochasticMatrix::from_rows(&[vec![0.7, 0.3], vec![0.5, 0.5]]).unwrap()
}

fn rel_sup_distance(x: &[f64], y: &[f64]) -> f64 {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max) / scale
}

/// Independent oracle: the consensus value of rate-asymmetric gossip is
/// `pi^T x0` for the left null vector of `diag(rates)(P - I)`.
fn rate_weighted_consensus(p: &StochasticMatrix, rates: &[f64], x0: &[f64]) -> f64 {
    let d = p.dim();
    let lambda = DMatrix::from_fn(d, d, |i, j| if i == j { rates[i] } else { 0.0 });
    let gen = lambda * (p.matrix() - DMatrix::<f64>::identity(d, d));
    let mut m = gen.transpose();
    for j in 0..d {
        m[(d - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(d);
    b[d - 1] = 1.0;
    let pi = m.lu().solve(&b).expect("one-dimensional null space");
    pi.iter().zip(x0).map(|(w, x)| w * x).sum()
}

#[test]
fn criterion_01_two_node_wrong_consensus() {
    let _lock = TIMED.lock().unwrap();
    let start = Instant::now();
    let cfg = WrongConsensusConfig {
        seeds: 200,
        horizon: 20_000,
        schedule: StepSchedule::Constant { a: 0.01 },
        consensus_tol: 1e-6,
        ..Default::default()
    };
    let summary = wrong_consensus_experiment(&cfg).unwrap();

    let prediction = rate_weighted_consensus(&cfg.p, &cfg.rates, &cfg.x0);
    assert!((prediction - 3.0 / 13.0).abs() < 1e-12, "oracle sanity: {prediction}");
    assert!(
        (summary.mean - prediction).abs() < 0.01,
        "mean consensus {} vs rate-weighted prediction {prediction}",
        summary.mean
    );
    assert!(
        (summary.mean - 0.375).abs() > 0.1,
        "mean consensus {} is not biased away from the true average",
        summary.mean
    );
    // The reported single-path value 0.2306 lies within the empirical spread.
    let lo = summary.final_consensus.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = summary.final_consensus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!((lo..=hi).contains(&0.2306));
    assert_eq!(summary.non_converged, 0);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "runtime {elapsed:?}");
    println!(
        "criterion 1 (two-node wrong consensus): PASS  mean {:.5} vs {:.5}, {elapsed:.2?}",
        summary.mean, prediction
    );
}

#[test]
fn criterion_02_rvi_reaches_the_stationary_average() {
    let _lock = TIMED.lock().unwrap();
    let start = Instant::now();
    let p = two_node();
    let x0 = [0.0, 1.0];
    for noise in [NoiseModel::None, NoiseModel::Awgn { variance: 0.25 }] {
        let mut hits = 0;
        for seed in 0..20 {
            let mut algo = RviGossip::new(
                NeighborSampler::plain(p.clone()),
                x0.to_vec(),
                0,
                Normalization::Anchor,
                false,
            )
            .unwrap();
            let opts = RunOptions::new(
                StepSchedule::Harmonic { c: 1.5 },
                ActivationProcess::PerNodeBernoulli { rates: vec![0.5, 1.0] },
                noise,
            )
            .with_horizon(100_000)
            .with_record_every(100_000)
            .with_seed(seed);
            let trace = engine::run(&mut algo, &x0, &opts).unwrap();
            let estimate = trace.final_row().extras[0];
            if (estimate - 0.375).abs() < 5e-3 {
                hits += 1;
            }
        }
        assert!(hits >= 18, "noise {noise:?}: only {hits}/20 seeds within 5e-3");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "runtime {elapsed:?}");
    println!("criterion 2 (RVI correctness, with and without AWGN): PASS  {elapsed:.2?}");
}

#[test]
fn criterion_03_error_dynamics_machinery() {
    // (a) Spectral radius below one across the stepsize grid and a
    // 10-matrix suite.
    let mut suite: Vec<StochasticMatrix> = vec![two_node()];
    for seed in 0..9 {
        let (_, p, _) = erdos_renyi_model(8, 0.5, seed).unwrap();
        suite.push(p);
    }
    for (idx, p) in suite.iter().enumerate() {
        for a in [0.01, 0.1, 0.5, 0.99] {
            let model = RviErrorModel::from_chain(p, 0, a).unwrap();
            assert!(model.spectral_radius < 1.0, "matrix {idx}, a {a}");
        }
    }

    // (b) Monte Carlo mean error matches (I + aA)^n e(0) within 3 standard
    // errors at n in {10, 50, 100} over 10^4 seeds on the two-node instance.
    let p = two_node();
    let cost = vec![0.0, 1.0];
    let vstar = solve_poisson(&p, &cost, 0).unwrap().v;
    let e0 = [1.0, -1.0];
    let y0: Vec<f64> = vstar.iter().zip(&e0).map(|(v, e)| v + e).collect();
    let a = 0.1;
    let a_matrix = error_dynamics_matrix(&p, 0);
    let checkpoints = [10u64, 50, 100];
    let seeds = 10_000u64;

    // errs[k][seed] = error vector at checkpoint k.
    let mut errs: Vec<Vec<[f64; 2]>> =
        (0..3).map(|_| Vec::with_capacity(seeds as usize)).collect();
    for seed in 0..seeds {
        let mut rng = RngStream::new(seed).substream("model", 0);
        let mut y = y0.clone();
        let mut next = 0;
        for n in 1..=100u64 {
            let old = y.clone();
            for (i, yi) in y.iter_mut().enumerate() {
                let xi = p.sample_row(i, rng.random());
                *yi = gossip_core::rvi::rvi_step(&p, i, &old, xi, a, &cost, 0, 0.0).unwrap();
            }
            if next < checkpoints.len() && n == checkpoints[next] {
                errs[next].push([y[0] - vstar[0], y[1] - vstar[1]]);
                next += 1;
            }
        }
    }
    for (k, &n) in checkpoints.iter().enumerate() {
        let expected = expected_error_curve(&a_matrix, a, &e0, n);
        for comp in 0..2 {
            let vals: Vec<f64> = errs[k].iter().map(|e| e[comp]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (vals.len() - 1) as f64;
            let se = (var / vals.len() as f64).sqrt();
            let dev = (mean - expected[comp]).abs();
            assert!(
                dev <= 3.0 * se,
                "n {n} component {comp}: |{mean} - {}| = {dev} > 3 SE = {}",
                expected[comp],
                3.0 * se
            );
        }
    }

    // (c) Empirical tail frequency never exceeds the concentration bound.
    let model = RviErrorModel::new(a_matrix.clone(), a).unwrap();
    for (k, &n) in checkpoints.iter().enumerate() {
        let expected = expected_error_curve(&a_matrix, a, &e0, n);
        for kval in [1.0, 2.0, 5.0] {
            let bound = model.concentration_bound(&cost, kval).unwrap();
            let threshold = kval * a;
            let count = errs[k]
                .iter()
                .filter(|e| {
                    let d0 = e[0] - expected[0];
                    let d1 = e[1] - expected[1];
                    (d0 * d0 + d1 * d1).sqrt() >= threshold
                })
                .count();
            let freq = count as f64 / errs[k].len() as f64;
            assert!(freq <= bound, "n {n}, K {kval}: frequency {freq} exceeds bound {bound}");
        }
    }
    println!("criterion 3 (error-dynamics machinery a/b/c): PASS");
}

#[test]
fn criterion_04_csma_validation() {
    let _lock = TIMED.lock().unwrap();
    let start = Instant::now();
    let links = vec![(0, 1), (0, 2), (0, 3)];
    let family = ActivationFamily::node_exclusive(links);
    let p = StochasticMatrix::from_rows(&[
        vec![0.0, 0.5, 0.3, 0.2],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
    ])
    .unwrap();

    // Frozen multipliers: occupation matches the product form within
    // total variation 0.01 at 10^6 time units.
    let zeta = vec![0.8, -0.3, 0.5];
    let phi = stationary_phi(&zeta, &p, &family).unwrap();
    let rates = csma_rates(&zeta, &p, &family).unwrap();
    let opts = CsmaOptions::new(1_000_000.0, 21).with_occupation();
    let trace = csma_simulate(&family, &rates.per_link, &opts).unwrap();
    let tv_frozen = total_variation(&trace.empirical_phi(&family).unwrap(), &phi);
    assert!(tv_frozen < 0.01, "frozen-zeta total variation {tv_frozen}");

    // After multiplier learning: conditional link frequencies within 0.05.
    let learned = learn_multipliers(&family, &p, &LearnOptions::new(1_000, 3)).unwrap();
    let rates = csma_rates(&learned.zeta, &p, &family).unwrap();
    let sim = csma_simulate(&family, &rates.per_link, &CsmaOptions::new(100_000.0, 17)).unwrap();
    let total = sim.node_counts[0] as f64;
    for (l, &(i, j)) in family.links().iter().enumerate() {
        let freq = sim.link_counts[l] as f64 / total;
        assert!(
            (freq - p.entry(i, j)).abs() < 0.05,
            "link ({i},{j}): frequency {freq} vs target {}",
            p.entry(i, j)
        );
    }

    // Learned distribution matches the entropy-program oracle within 0.02.
    let oracle = solve_entropy_program(&family, &p).unwrap();
    let learned_phi = stationary_phi(&learned.zeta, &p, &family).unwrap();
    let tv_learned = total_variation(&learned_phi, &oracle.phi);
    assert!(tv_learned < 0.02, "learned-vs-oracle total variation {tv_learned}");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "runtime {elapsed:?}");
    println!(
        "criterion 4 (CSMA validation): PASS  TV frozen {tv_frozen:.4}, learned {tv_learned:.4}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_05_multihop() {
    // Stationary distribution preserved to 1e-10 and |lambda_2| strictly
    // smaller at alpha = 0.8 on every suite matrix.
    let mut suite: Vec<StochasticMatrix> = vec![two_node()];
    for seed in 0..4 {
        let (_, p, _) = erdos_renyi_model(20, 0.3, seed).unwrap();
        suite.push(p);
    }
    for (idx, p) in suite.iter().enumerate() {
        let mixed = multihop_matrix(p, 0.8).unwrap();
        let eta = stationary_distribution(p).unwrap();
        let eta_mixed = stationary_distribution(&mixed).unwrap();
        for (a, b) in eta.iter().zip(&eta_mixed) {
            assert!((a - b).abs() < 1e-10, "matrix {idx}: stationary moved");
        }
        assert!(
            second_eigenvalue_modulus(&mixed) < second_eigenvalue_modulus(p),
            "matrix {idx}: second eigenvalue did not shrink"
        );
    }

    // On the 100-node instance, two-hop sampling reaches supErr < 0.05 in
    // fewer ticks than single-hop on a majority of 20 seeds.
    let (_, p, _) = erdos_renyi_model(100, 0.2, 1).unwrap();
    let mut rng0 = ChaCha8Rng::seed_from_u64(7);
    let x0: Vec<f64> = (0..100).map(|_| rng0.random::<f64>()).collect();
    let means: Vec<f64> = (0..100).map(|i| 10.0 + (i + 1) as f64).collect();
    let first_hit = |sampler: NeighborSampler, seed: u64| -> Option<u64> {
        let mut algo =
            RviGossip::new(sampler, x0.clone(), 0, Normalization::Anchor, true).unwrap();
        let opts = RunOptions::new(
            StepSchedule::Harmonic { c: 1.0 },
            ActivationProcess::PerNodePeriodicRandom { mean_intervals: means.clone() },
            NoiseModel::None,
        )
        .with_horizon(100_000)
        .with_record_every(500)
        .with_seed(seed);
        let trace = engine::run(&mut algo, &x0, &opts).unwrap();
        trace.rows.iter().find(|r| r.sup_err < 0.05).map(|r| r.n)
    };
    let mut wins = 0;
    for seed in 0..20 {
        let single = first_hit(NeighborSampler::plain(p.clone()), seed);
        let two = first_hit(
            NeighborSampler::two_hop(p.clone(), 0.8, StalenessMode::StoredOneRound).unwrap(),
            seed,
        );
        match (two, single) {
            (Some(t2), Some(t1)) if t2 < t1 => wins += 1,
            (Some(_), None) => wins += 1,
            _ => {}
        }
    }
    assert!(wins > 10, "two-hop faster on only {wins}/20 seeds");
    println!("criterion 5 (multihop): PASS  two-hop faster on {wins}/20 seeds");
}

#[test]
fn criterion_06_importance_sampling() {
    // Closed-form Q beats every grid point at resolution 1e-3 on a skewed
    // row (the objective is row-separable).
    let row = [0.9f64, 0.09, 0.01];
    let p = StochasticMatrix::from_rows(&[
        row.to_vec(),
        vec![0.1, 0.8, 0.1],
        vec![0.3, 0.3, 0.4],
    ])
    .unwrap();
    let q = optimal_importance_matrix(&p);
    let closed_form: f64 = (0..3).map(|j| p.entry(0, j) / q.entry(0, j)).sum();
    let steps = 1000usize;
    let mut grid_best = f64::INFINITY;
    for a in 1..steps {
        for b in 1..(steps - a) {
            let c = steps - a - b;
            let cand = [a as f64 / steps as f64, b as f64 / steps as f64, c as f64 / steps as f64];
            let cost: f64 = row.iter().zip(&cand).map(|(p, q)| p / q).sum();
            if cost < grid_best {
                grid_best = cost;
            }
        }
    }
    assert!(closed_form <= grid_best + 1e-12, "{closed_form} vs grid {grid_best}");

    // Conditional unbiasedness by exact enumeration on every row.
    let x = [2.0, -1.0, 0.4];
    let a = 0.3;
    for i in 0..3 {
        let mean: f64 = (0..3)
            .map(|j| {
                let l = p.entry(i, j) / q.entry(i, j);
                q.entry(i, j) * importance_pull_step(i, &x, j, a, l, 0.0)
            })
            .sum();
        let expected = (1.0 - a) * x[i] + a * p.row_dot(i, &x);
        assert!((mean - expected).abs() < 1e-14, "row {i} biased");
    }

    // Variance inflation on the skewed row (closed form, constant data).
    let data = [1.0, 1.0, 1.0];
    let mean: f64 = row.iter().zip(&data).map(|(p, x)| p * x).sum();
    let var_plain: f64 =
        row.iter().zip(&data).map(|(p, x)| p * x * x).sum::<f64>() - mean * mean;
    let var_importance: f64 = (0..3)
        .map(|j| row[j] * row[j] * data[j] * data[j] / q.entry(0, j))
        .sum::<f64>()
        - mean * mean;
    assert!(var_importance > var_plain + 1e-3, "{var_importance} vs {var_plain}");
    println!(
        "criterion 6 (importance sampling): PASS  cost {closed_form:.6} <= grid {grid_best:.6}, variance {var_importance:.4} > {var_plain:.4}"
    );
}

#[test]
fn criterion_07_pf_gossip() {
    let _lock = TIMED.lock().unwrap();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows: Vec<Vec<f64>> =
        (0..10).map(|_| (0..10).map(|_| rng.random::<f64>() + 0.05).collect()).collect();
    let q = NonnegativeMatrix::from_rows(&rows).unwrap();
    let alpha = vec![0.1; 10];
    let x0 = vec![1.0; 10];

    // Synchronous variant, with the ratio invariant checked on every step.
    let mut sync_hits = 0;
    for seed in 0..20 {
        let mut algo =
            PfGossip::new(&q, alpha.clone(), PfUpdate::Standard, XbarMode::Exact, false).unwrap();
        let qstar = algo.qstar().to_vec();
        let opts = RunOptions::new(
            StepSchedule::Harmonic { c: 1.0 },
            ActivationProcess::Synchronous,
            NoiseModel::None,
        )
        .with_horizon(100_000)
        .with_record_every(1)
        .with_snapshots()
        .with_seed(seed);
        let trace = engine::run(&mut algo, &x0, &opts).unwrap();
        if rel_sup_distance(&trace.final_x, &qstar) < 2e-2 {
            sync_hits += 1;
        }
        let ratios = |x: &[f64]| {
            let r: Vec<f64> = x.iter().zip(&qstar).map(|(x, q)| (x / q).abs()).collect();
            let phi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mu = r.iter().copied().fold(f64::INFINITY, f64::min);
            (phi, mu)
        };
        let (phi0, mu0) = ratios(&trace.snapshots[0].1);
        let k = phi0 / mu0;
        assert!(phi0 <= k, "initial data violates the ratio premise");
        for (n, x) in &trace.snapshots {
            let (phi, _) = ratios(x);
            assert!(phi <= k + 1e-12, "seed {seed}, tick {n}: phi {phi} > K {k}");
        }
    }
    assert!(sync_hits >= 18, "synchronous: {sync_hits}/20 within 2e-2");

    // Asynchronous variant with per-node stepsize counters.
    let rates: Vec<f64> = (0..10).map(|i| 0.3 + 0.7 * i as f64 / 9.0).collect();
    let mut async_hits = 0;
    for seed in 0..20 {
        let mut algo =
            PfGossip::new(&q, alpha.clone(), PfUpdate::Standard, XbarMode::Exact, true).unwrap();
        let qstar = algo.qstar().to_vec();
        let opts = RunOptions::new(
            StepSchedule::Harmonic { c: 1.0 },
            ActivationProcess::PerNodeBernoulli { rates: rates.clone() },
            NoiseModel::None,
        )
        .with_horizon(100_000)
        .with_record_every(100_000)
        .with_seed(seed);
        let trace = engine::run(&mut algo, &x0, &opts).unwrap();
        if rel_sup_distance(&trace.final_x, &qstar) < 2e-2 {
            async_hits += 1;
        }
    }
    assert!(async_hits >= 18, "asynchronous: {async_hits}/20 within 2e-2");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "runtime {elapsed:?}");
    println!(
        "criterion 7 (Perron-Frobenius gossip): PASS  sync {sync_hits}/20, async {async_hits}/20, {elapsed:.2?}"
    );
}

#[test]
fn criterion_08_ranking_applications() {
    // Gibbs stationary distribution matches exp(-psi/C)/Z to 1e-9.
    let psi = vec![0.3, 1.1, 0.2, 2.0, 0.7, 1.5];
    let d = 6;
    let nbrs: Vec<Vec<usize>> = (0..d).map(|i| vec![(i + d - 1) % d, (i + 1) % d]).collect();
    let temperature = 0.8;
    let gibbs = gibbs_matrix(&psi, &nbrs, temperature).unwrap();
    let eta = stationary_distribution(&gibbs).unwrap();
    let weights: Vec<f64> = psi.iter().map(|v| (-v / temperature).exp()).collect();
    let z: f64 = weights.iter().sum();
    for i in 0..d {
        assert!((eta[i] - weights[i] / z).abs() < 1e-9, "gibbs node {i}");
    }

    // PageRank gossip within 1e-2 of the dense vector on a 6-node chain.
    let mut rows = vec![vec![0.0; d]; d];
    for i in 0..d - 1 {
        rows[i][i + 1] = 0.7;
        rows[i][0] = 0.3;
    }
    rows[d - 1][0] = 1.0;
    let ptilde = StochasticMatrix::from_rows(&rows).unwrap();
    let mut algo = PageRankGossip::new(ptilde.clone(), 0.15).unwrap();
    let target = algo.pagerank().to_vec();
    let opts = RunOptions::new(
        StepSchedule::Harmonic { c: 1.0 },
        ActivationProcess::Synchronous,
        NoiseModel::None,
    )
    .with_horizon(300_000)
    .with_record_every(300_000)
    .with_seed(6);
    let trace = engine::run(&mut algo, &vec![1.0 / d as f64; d], &opts).unwrap();
    for (v, o) in trace.final_x.iter().zip(&target) {
        assert!((v - o).abs() < 1e-2, "pagerank component {v} vs {o}");
    }

    // HITS gossip within 2e-2 of the A^T A eigenvector on a 10-node digraph.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut adj = DMatrix::<f64>::zeros(10, 10);
    for i in 0..10 {
        adj[(i, (i + 1) % 10)] = 1.0;
        for j in 0..10 {
            if i != j && rng.random::<f64>() < 0.3 {
                adj[(i, j)] = 1.0;
            }
        }
    }
    let mut algo = HitsGossip::new(&NonnegativeMatrix::from_matrix(adj).unwrap()).unwrap();
    let qstar = algo.qstar().to_vec();
    let opts = RunOptions::new(
        StepSchedule::Harmonic { c: 1.0 },
        ActivationProcess::Synchronous,
        NoiseModel::None,
    )
    .with_horizon(200_000)
    .with_record_every(200_000)
    .with_seed(7);
    let trace = engine::run(&mut algo, &[1.0; 10], &opts).unwrap();
    let hits_err = rel_sup_distance(&trace.final_x, &qstar);
    assert!(hits_err < 2e-2, "hits error {hits_err}");

    // Reputation gossip within 2e-2 of the activity-weighted eigenvector.
    let means = DMatrix::from_row_slice(3, 3, &[0.0, 9.0, 4.0, 6.0, 0.0, 5.0, 3.0, 7.0, 0.0]);
    let polls = StochasticMatrix::from_rows(&[
        vec![0.0, 0.6, 0.4],
        vec![0.55, 0.0, 0.45],
        vec![0.3, 0.7, 0.0],
    ])
    .unwrap();
    let activity = vec![1.0, 2.0, 3.0];
    let ratings = RatingModel::new(means, 0).unwrap();
    let mut algo = ReputationGossip::new(polls, ratings, activity.clone()).unwrap();
    let qstar = algo.qstar().to_vec();
    let opts = RunOptions::new(
        StepSchedule::Harmonic { c: 0.5 },
        ActivationProcess::SingleWeighted { weights: activity },
        NoiseModel::None,
    )
    .with_horizon(400_000)
    .with_record_every(400_000)
    .with_seed(8);
    let trace = engine::run(&mut algo, &[1.0; 3], &opts).unwrap();
    let rep_err = rel_sup_distance(&trace.final_x, &qstar);
    assert!(rep_err < 2e-2, "reputation error {rep_err}");
    println!(
        "criterion 8 (applications): PASS  hits err {hits_err:.4}, reputation err {rep_err:.4}"
    );
}

#[test]
fn criterion_09_pca() {
    let _lock = TIMED.lock().unwrap();
    let start = Instant::now();
    let (d, sigma, horizon, block) = (20usize, 1.0f64, 80_000u64, 4_000u64);

    let mut sa_aligned = 0;
    let mut norm_ok = 0;
    for seed in 0..20 {
        let stream = PcaStream::with_random_direction(d, sigma, 7).unwrap();
        let q = stream.unit_q().to_vec();
        let mut algo = PcaStochastic::new(stream);
        let opts = RunOptions::new(
            StepSchedule::Harmonic { c: 2.0 },
            ActivationProcess::Synchronous,
            NoiseModel::None,
        )
        .with_horizon(horizon)
        .with_record_every(horizon)
        .with_seed(seed);
        let trace = engine::run(&mut algo, &[1.0; 20], &opts).unwrap();
        if alignment_angle(&trace.final_x, &q) < 0.15 {
            sa_aligned += 1;
        }
        let norm: f64 = trace.final_x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 2.0).abs() < 0.1 * 2.0 {
            norm_ok += 1;
        }
    }
    assert!(sa_aligned >= 16, "stochastic method aligned on {sa_aligned}/20");
    assert!(norm_ok >= 16, "iterate norm within 10% of 2 on {norm_ok}/20");

    let mut block_aligned = 0;
    for seed in 0..20 {
        let stream = PcaStream::with_random_direction(d, sigma, 7).unwrap();
        let q = stream.unit_q().to_vec();
        let mut algo = PcaBlock::new(stream, block).unwrap();
        let opts = RunOptions::new(
            StepSchedule::Constant { a: 0.5 },
            ActivationProcess::Synchronous,
            NoiseModel::None,
        )
        .with_horizon(horizon)
        .with_record_every(horizon)
        .with_seed(seed);
        let trace = engine::run(&mut algo, &[1.0; 20], &opts).unwrap();
        if alignment_angle(&trace.final_x, &q) < 0.15 {
            block_aligned += 1;
        }
    }
    assert!(block_aligned >= 16, "block method aligned on {block_aligned}/20");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "runtime {elapsed:?}");
    println!(
        "criterion 9 (PCA, d=20 sigma=1 T=80000 B=4000): PASS  sa {sa_aligned}/20, block {block_aligned}/20, norm {norm_ok}/20, {elapsed:.2?}"
    );
}

#[test]
fn criterion_10_figures_qualitative_only() {
    // The figure presets reproduce curve shapes and orderings; exact
    // trajectories are sample-path dependent and the original stepsizes are
    // not pinned anywhere, so no quantitative assertion is made here beyond
    // the presets existing and validating. All quantitative gates are
    // criteria 1-9.
    let names: Vec<&str> = gossip_cli::presets::all().iter().map(|p| p.name).collect();
    for expected in [
        "fig1_two_node",
        "fig2_er100_rvi",
        "fig3_csma",
        "fig4_multihop",
        "fig5_importance_noiseless",
        "fig6_importance_noisy",
        "fig7_pca",
    ] {
        assert!(names.contains(&expected));
    }
    println!("criterion 10 (figures qualitative only): PASS  presets cover every figure");
}
