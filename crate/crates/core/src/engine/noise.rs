//! Measurement noise injected into pulled values.

use super::EngineError;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// I.i.d. zero-mean Gaussian with the given variance.
    Awgn { variance: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), EngineError> {
        if let NoiseModel::Awgn { variance } = *self {
            if !(variance > 0.0 && variance.is_finite()) {
                return Err(EngineError::BadNoise(format!(
                    "AWGN variance must be positive and finite, got {variance}"
                )));
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Awgn { variance } => {
                Normal::new(0.0, variance.sqrt()).expect("validated").sample(rng)
            }
        }
    }
}
