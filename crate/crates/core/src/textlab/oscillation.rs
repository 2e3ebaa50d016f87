use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sine-wave sentence-length schedule, in characters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationParams {
    pub base_len: f64,
    pub amplitude: f64,
    /// Radians per sentence.
    pub omega: f64,
    pub phase: f64,
    pub noise_sd: f64,
    pub min_len: usize,
}

impl Default for OscillationParams {
    fn default() -> Self {
        OscillationParams {
            base_len: 17.0,
            amplitude: 8.0,
            omega: 0.5,
            phase: 0.0,
            noise_sd: 0.0,
            min_len: 1,
        }
    }
}

impl OscillationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_len >= 1.0) || !self.base_len.is_finite() {
            return Err(Error::invalid("base_len", "must be >= 1"));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::invalid("amplitude", "must be >= 0"));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(Error::invalid("noise_sd", "must be >= 0"));
        }
        if !self.omega.is_finite() || !self.phase.is_finite() {
            return Err(Error::invalid("omega", "omega and phase must be finite"));
        }
        if self.min_len == 0 {
            return Err(Error::invalid("min_len", "must be >= 1"));
        }
        Ok(())
    }
}

// Keeps exact integers from dropping a unit through sine round-off.
const FLOOR_SLACK: f64 = 1e-9;

/// Target lengths for sentences 1..=n.
pub fn oscillation_schedule(params: &OscillationParams, n: usize, seed: u64) -> Result<Vec<usize>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise =
        Normal::new(0.0, params.noise_sd).map_err(|e| Error::invalid("noise_sd", e.to_string()))?;
    Ok((1..=n)
        .map(|i| {
            let eps = if params.noise_sd > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            let raw = params.base_len
                + params.amplitude * (params.omega * i as f64 + params.phase).sin()
                + eps;
            let len = (raw + FLOOR_SLACK).floor();
            if len < params.min_len as f64 {
                params.min_len
            } else {
                len as usize
            }
        })
        .collect())
}
