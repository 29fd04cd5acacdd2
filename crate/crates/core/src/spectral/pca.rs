//! Streaming principal-component estimation from i.i.d. Gaussian samples
//! with a planted unit direction: covariance `q q^T + sigma^2 I`.
//!
//! Two methods over the same sample stream: a stochastic-approximation
//! update whose iterate norm converges to the principal eigenvalue
//! `1 + sigma^2`, and a block power method that averages `<z, x> x` over
//! blocks and renormalizes. Both treat each engine tick as one sample and
//! ignore activation subsets and the engine noise model (the stream itself
//! carries the noise).

use super::SpectralError;
use crate::algo::{GossipAlgorithm, StepContext, StepError};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Sample generator: `x(n) = q z(n) + w(n)` with scalar `z ~ N(0,1)` and
/// isotropic `w ~ N(0, sigma^2 I)`.
#[derive(Debug, Clone)]
pub struct PcaStream {
    q: Vec<f64>,
    sigma: f64,
}

impl PcaStream {
    /// `q` is normalized to a unit vector; it must be nonzero.
    pub fn new(q: Vec<f64>, sigma: f64) -> Result<Self, SpectralError> {
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 || q.is_empty() {
            return Err(SpectralError::BadWeights);
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(SpectralError::BadWeights);
        }
        Ok(Self { q: q.iter().map(|v| v / norm).collect(), sigma })
    }

    /// Random unit direction drawn from an independent, config-level seed.
    pub fn with_random_direction(d: usize, sigma: f64, direction_seed: u64) -> Result<Self, SpectralError> {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(direction_seed);
        let q: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Self::new(q, sigma)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The planted unit direction.
    pub fn unit_q(&self) -> &[f64] {
        &self.q
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let z: f64 = rng.sample(StandardNormal);
        self.q
            .iter()
            .map(|qk| {
                let w: f64 = rng.sample::<f64, _>(StandardNormal) * self.sigma;
                qk * z + w
            })
            .collect()
    }
}

/// Sign-invariant alignment error: `arccos(|<y, q>| / ||y||)` for unit `q`.
pub fn alignment_angle(y: &[f64], q_unit: &[f64]) -> f64 {
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let dot: f64 = y.iter().zip(q_unit).map(|(a, b)| a * b).sum();
    (dot.abs() / norm).min(1.0).acos()
}

/// Stochastic-approximation power method:
/// `y <- (1 - a) y + a <y/||y||, x> x`, initialized at the first sample.
pub struct PcaStochastic {
    stream: PcaStream,
}

impl PcaStochastic {
    pub fn new(stream: PcaStream) -> Self {
        Self { stream }
    }

    pub fn stream(&self) -> &PcaStream {
        &self.stream
    }
}

impl GossipAlgorithm for PcaStochastic {
    fn dim(&self) -> usize {
        self.stream.dim()
    }

    fn target(&self) -> Vec<f64> {
        // Fixed point: y = (1 + sigma^2) q, up to the sign of q.
        let scale = 1.0 + self.stream.sigma * self.stream.sigma;
        self.stream.q.iter().map(|v| v * scale).collect()
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        vec!["angle_to_q", "y_norm"]
    }

    fn init_override(&mut self, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        Some(self.stream.sample(rng))
    }

    fn step(
        &mut self,
        y: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(StepError::ZeroVector { context: "pca iterate" });
        }
        let x = self.stream.sample(rng);
        let proj: f64 = y.iter().zip(&x).map(|(yk, xk)| yk * xk).sum::<f64>() / norm;
        let a = ctx.stepsize;
        for (yk, xk) in y.iter_mut().zip(&x) {
            *yk = (1.0 - a) * *yk + a * proj * xk;
        }
        Ok(())
    }

    fn extras(&mut self, y: &[f64], _z: &[f64]) -> Vec<f64> {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        vec![alignment_angle(y, &self.stream.q), norm]
    }
}

/// Block power method: accumulate `(1/B) sum <z, x> x` over each block of
/// `B` samples, then normalize into the next unit iterate.
pub struct PcaBlock {
    stream: PcaStream,
    block: u64,
    acc: Vec<f64>,
}

impl PcaBlock {
    pub fn new(stream: PcaStream, block: u64) -> Result<Self, SpectralError> {
        if block == 0 {
            return Err(SpectralError::BadWeights);
        }
        let d = stream.dim();
        Ok(Self { stream, block, acc: vec![0.0; d] })
    }

    pub fn stream(&self) -> &PcaStream {
        &self.stream
    }
}

impl GossipAlgorithm for PcaBlock {
    fn dim(&self) -> usize {
        self.stream.dim()
    }

    fn target(&self) -> Vec<f64> {
        self.stream.q.clone()
    }

    fn extra_columns(&self) -> Vec<&'static str> {
        vec!["angle_to_q", "z_norm"]
    }

    fn init_override(&mut self, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        // z(0) = Z / ||Z|| for Z ~ N(0, I).
        let z: Vec<f64> = (0..self.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        Some(z.iter().map(|v| v / norm).collect())
    }

    fn step(
        &mut self,
        z: &mut [f64],
        ctx: &StepContext<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), StepError> {
        let x = self.stream.sample(rng);
        let proj: f64 = z.iter().zip(&x).map(|(zk, xk)| zk * xk).sum();
        let b = self.block as f64;
        for (acc, xk) in self.acc.iter_mut().zip(&x) {
            *acc += proj * xk / b;
        }
        if (ctx.tick + 1).is_multiple_of(self.block) {
            let norm = self.acc.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(StepError::ZeroVector { context: "pca block accumulator" });
            }
            for (zk, acc) in z.iter_mut().zip(&mut self.acc) {
                *zk = *acc / norm;
                *acc = 0.0;
            }
        }
        Ok(())
    }

    fn extras(&mut self, z: &[f64], _avg: &[f64]) -> Vec<f64> {
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        vec![alignment_angle(z, &self.stream.q), norm]
    }
}
