//! Stepsize schedules.

use super::EngineError;
use serde::{Deserialize, Serialize};

/// Stepsize sequence `a(n)`. The decreasing kinds satisfy
/// `sum a(n) = inf` and `sum a(n)^2 < inf` by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    /// `a(n) = a`.
    Constant { a: f64 },
    /// `a(n) = c / (n + 1)`.
    Harmonic { c: f64 },
    /// `a(n) = c / ceil((n + 1) / m)`: harmonic decay held for blocks of `m`.
    HarmonicBlocked { c: f64, m: u64 },
}

impl StepSchedule {
    pub fn validate(&self) -> Result<(), EngineError> {
        match *self {
            StepSchedule::Constant { a } => {
                if !a.is_finite() || a <= 0.0 || a >= 1.0 {
                    return Err(EngineError::BadSchedule(format!(
                        "constant stepsize must lie in (0, 1), got {a}"
                    )));
                }
            }
            StepSchedule::Harmonic { c } => {
                if !c.is_finite() || c <= 0.0 {
                    return Err(EngineError::BadSchedule(format!("c must be positive, got {c}")));
                }
            }
            StepSchedule::HarmonicBlocked { c, m } => {
                if !c.is_finite() || c <= 0.0 {
                    return Err(EngineError::BadSchedule(format!("c must be positive, got {c}")));
                }
                if m == 0 {
                    return Err(EngineError::BadSchedule("block length m must be >= 1".into()));
                }
            }
        }
        Ok(())
    }

    pub fn at(&self, n: u64) -> f64 {
        match *self {
            StepSchedule::Constant { a } => a,
            StepSchedule::Harmonic { c } => c / (n + 1) as f64,
            StepSchedule::HarmonicBlocked { c, m } => c / ((n + m) / m) as f64,
        }
    }
}
