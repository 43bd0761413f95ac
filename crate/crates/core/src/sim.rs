//! Synthetic measurements: ranges plus i.i.d. Gaussian noise and a clock bias
//! shared by every receiver.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::geometry::{SensorConfig, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub bias: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, bias: f64, seed: u64) -> Result<Self> {
        let s = NoiseSpec { sigma, bias, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || !self.bias.is_finite() {
            return Err(GeoError::NonFinite);
        }
        if self.sigma < 0.0 {
            return Err(GeoError::InvalidParam(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Recorded with every batch so the noise model is explicit in the output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseMetadata {
    pub distribution: &'static str,
    pub generator: &'static str,
    pub seed: u64,
    pub sigma: f64,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisyBatch {
    /// Noiseless ranges, one per receiver.
    pub truth: Vec<f64>,
    /// `n` rows of noisy ranges.
    pub samples: Vec<Vec<f64>>,
    pub metadata: NoiseMetadata,
}

/// `T_hat = T + eps + bias (1, ..., 1)` with `eps_i ~ N(0, sigma^2)`, drawn
/// from a ChaCha8 stream seeded with `spec.seed`, receiver by receiver within
/// each sample.
pub fn gen_noisy_toa(config: &SensorConfig, x: Vec3, spec: NoiseSpec, n: usize) -> Result<NoisyBatch> {
    spec.validate()?;
    if n == 0 {
        return Err(GeoError::InvalidParam("sample count must be >= 1".into()));
    }
    if !x.is_finite() {
        return Err(GeoError::NonFinite);
    }
    let truth: Vec<f64> = config.receivers().iter().map(|m| m.dist(x)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.sigma).map_err(|e| GeoError::InvalidParam(e.to_string()))?;
    let samples = (0..n)
        .map(|_| {
            truth
                .iter()
                .map(|t| {
                    let eps = if spec.sigma == 0.0 { 0.0 } else { normal.sample(&mut rng) };
                    t + eps + spec.bias
                })
                .collect()
        })
        .collect();
    Ok(NoisyBatch {
        truth,
        samples,
        metadata: NoiseMetadata {
            distribution: "gaussian",
            generator: "chacha8",
            seed: spec.seed,
            sigma: spec.sigma,
            bias: spec.bias,
        },
    })
}
