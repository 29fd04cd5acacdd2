//! Named experiment presets. Each preset is a list of labeled experiment
//! configurations sharing a setup, e.g. the same network with the scheme or
//! noise model varied.

use crate::config::{
    ActivationSpec, AlgorithmSpec, ExperimentConfig, InitSpec, NetworkSpec, SeedSpec,
};
use gossip_core::engine::{NoiseModel, StepSchedule};
use serde_json::json;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub build: fn() -> Vec<(String, ExperimentConfig)>,
}

static PRESETS: &[Preset] = &[
    Preset {
        name: "fig1_two_node",
        description: "two-node comparison: vanilla vs relative-value, noiseless and with AWGN",
        build: fig1_two_node,
    },
    Preset {
        name: "fig2_er100_rvi",
        description: "relative-value iteration on a 100-node random graph, noisy asynchronous",
        build: fig2_er100_rvi,
    },
    Preset {
        name: "fig3_csma",
        description: "relative-value iteration driven by learned CSMA/CA link activations",
        build: fig3_csma,
    },
    Preset {
        name: "fig4_multihop",
        description: "single-hop vs two-hop sampling on the 100-node random graph",
        build: fig4_multihop,
    },
    Preset {
        name: "fig5_importance_noiseless",
        description: "plain vs importance-sampled polling, noiseless data",
        build: fig5_importance_noiseless,
    },
    Preset {
        name: "fig6_importance_noisy",
        description: "plain vs importance-sampled polling, AWGN-corrupted data",
        build: fig6_importance_noisy,
    },
    Preset {
        name: "fig7_pca",
        description: "streaming PCA: stochastic-approximation vs block power method",
        build: fig7_pca,
    },
];

pub fn all() -> &'static [Preset] {
    PRESETS
}

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn two_node_network() -> NetworkSpec {
    NetworkSpec::Inline { rows: vec![vec![0.7, 0.3], vec![0.5, 0.5]] }
}

fn er100_network() -> NetworkSpec {
    NetworkSpec::ErdosRenyi { d: 100, p_edge: 0.2, seed: 1 }
}

fn seeds(n: u64) -> SeedSpec {
    SeedSpec::Count { n, base: 0 }
}

fn fig1_two_node() -> Vec<(String, ExperimentConfig)> {
    let base = |name: &str, id: &str, noise: NoiseModel| ExperimentConfig {
        name: name.to_string(),
        algorithm: AlgorithmSpec { id: id.to_string(), params: serde_json::Value::Null },
        network: two_node_network(),
        x0: InitSpec::Inline { values: vec![0.0, 1.0] },
        schedule: StepSchedule::Constant { a: 0.05 },
        activation: ActivationSpec::Bernoulli { rates: vec![0.5, 1.0] },
        noise,
        horizon: 100_000,
        record_every: 100,
        seeds: seeds(5),
    };
    vec![
        ("vanilla_noiseless".into(), base("fig1 vanilla noiseless", "vanilla", NoiseModel::None)),
        (
            "vanilla_awgn".into(),
            base("fig1 vanilla with AWGN", "vanilla", NoiseModel::Awgn { variance: 0.25 }),
        ),
        ("rvi_noiseless".into(), base("fig1 rvi noiseless", "rvi", NoiseModel::None)),
        ("rvi_awgn".into(), base("fig1 rvi with AWGN", "rvi", NoiseModel::Awgn { variance: 0.25 })),
    ]
}

fn er_rvi_base(name: &str, noise: NoiseModel) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        algorithm: AlgorithmSpec {
            id: "rvi".to_string(),
            params: json!({"per_node_steps": true}),
        },
        network: er100_network(),
        x0: InitSpec::Uniform { lo: 0.0, hi: 1.0, seed: 7 },
        schedule: StepSchedule::Harmonic { c: 1.0 },
        activation: ActivationSpec::PeriodicRandomLinear { base: 10.0, slope: 1.0 },
        noise,
        horizon: 100_000,
        record_every: 500,
        seeds: seeds(5),
    }
}

fn fig2_er100_rvi() -> Vec<(String, ExperimentConfig)> {
    vec![("rvi_awgn".into(), er_rvi_base("fig2 rvi on ER100", NoiseModel::Awgn { variance: 0.25 }))]
}

fn fig3_csma() -> Vec<(String, ExperimentConfig)> {
    let mut config = er_rvi_base("fig3 rvi under CSMA", NoiseModel::Awgn { variance: 0.25 });
    config.activation = ActivationSpec::Csma {
        learn_blocks: 70,
        alpha: StepSchedule::Harmonic { c: 0.05 },
        clamp_zeta: false,
    };
    config.horizon = 200_000;
    config.record_every = 500;
    config.seeds = seeds(2);
    vec![("rvi_csma".into(), config)]
}

fn fig4_multihop() -> Vec<(String, ExperimentConfig)> {
    let mut single = er_rvi_base("fig4 single hop", NoiseModel::None);
    single.algorithm.params = json!({"per_node_steps": true, "sampling": {"kind": "plain"}});
    let mut two = er_rvi_base("fig4 two hop", NoiseModel::None);
    two.algorithm.params = json!({
        "per_node_steps": true,
        "sampling": {"kind": "two_hop", "alpha": 0.8, "mode": "stored_one_round"}
    });
    vec![("single_hop".into(), single), ("two_hop".into(), two)]
}

fn importance_pair(noise: NoiseModel, tag: &str) -> Vec<(String, ExperimentConfig)> {
    let base = |name: &str, sampling: serde_json::Value| ExperimentConfig {
        name: name.to_string(),
        algorithm: AlgorithmSpec { id: "vanilla".to_string(), params: json!({"sampling": sampling}) },
        network: er100_network(),
        x0: InitSpec::Uniform { lo: 0.0, hi: 1.0, seed: 7 },
        schedule: StepSchedule::Constant { a: 0.05 },
        activation: ActivationSpec::PeriodicRandomLinear { base: 10.0, slope: 1.0 },
        noise,
        horizon: 100_000,
        record_every: 500,
        seeds: seeds(5),
    };
    vec![
        (
            "plain_sampling".into(),
            base(&format!("{tag}: plain polling"), json!({"kind": "plain"})),
        ),
        (
            "importance_sampling".into(),
            base(&format!("{tag}: sqrt-optimal polling"), json!({"kind": "importance"})),
        ),
    ]
}

fn fig5_importance_noiseless() -> Vec<(String, ExperimentConfig)> {
    importance_pair(NoiseModel::None, "fig5")
}

fn fig6_importance_noisy() -> Vec<(String, ExperimentConfig)> {
    importance_pair(NoiseModel::Awgn { variance: 0.25 }, "fig6")
}

fn fig7_pca() -> Vec<(String, ExperimentConfig)> {
    let base = |name: &str, id: &str, schedule: StepSchedule| ExperimentConfig {
        name: name.to_string(),
        algorithm: AlgorithmSpec {
            id: id.to_string(),
            params: json!({"dim": 20, "sigma": 1.0, "block": 4000, "direction_seed": 7}),
        },
        network: NetworkSpec::None,
        x0: InitSpec::Ones,
        schedule,
        activation: ActivationSpec::Synchronous,
        noise: NoiseModel::None,
        horizon: 80_000,
        record_every: 4_000,
        seeds: seeds(5),
    };
    vec![
        (
            "stochastic_approximation".into(),
            base("fig7 stochastic approximation", "pca_sa", StepSchedule::Harmonic { c: 2.0 }),
        ),
        (
            "block_power".into(),
            base("fig7 block power method", "pca_block", StepSchedule::Constant { a: 0.5 }),
        ),
    ]
}
