use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationForm {
    /// `q ∝ p^(1/τ) · mask`.
    #[default]
    Tempered,
    /// `q ∝ max(0, p·(1−β) + ε) · mask` with ε ~ N(0, noise_sd²).
    Additive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    pub temperature: f64,
    /// Per-token multiplier; empty means all ones.
    pub mask: Vec<f64>,
    pub damping: f64,
    pub noise_sd: f64,
    pub leap_threshold: f64,
    pub form: PerturbationForm,
}

impl Default for PerturbationParams {
    fn default() -> Self {
        PerturbationParams {
            temperature: 1.0,
            mask: Vec::new(),
            damping: 0.0,
            noise_sd: 0.0,
            leap_threshold: 0.5,
            form: PerturbationForm::Tempered,
        }
    }
}

const SUM_TOLERANCE: f64 = 1e-9;

pub fn perturb_distribution(p: &[f64], params: &PerturbationParams, seed: u64) -> Result<Vec<f64>> {
    if p.is_empty() {
        return Err(Error::NoInput("probability vector".into()));
    }
    if p.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::invalid(
            "p",
            "entries must be finite and non-negative",
        ));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Unnormalized(total));
    }
    if !(params.temperature > 0.0) || !params.temperature.is_finite() {
        return Err(Error::invalid("temperature", "must be > 0"));
    }
    if !params.mask.is_empty() {
        if params.mask.len() != p.len() {
            return Err(Error::LengthMismatch {
                left: p.len(),
                right: params.mask.len(),
            });
        }
        if params.mask.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::invalid(
                "mask",
                "entries must be finite and non-negative",
            ));
        }
    }
    let mask = |i: usize| params.mask.get(i).copied().unwrap_or(1.0);

    let raw: Vec<f64> = match params.form {
        PerturbationForm::Tempered => {
            // Work in log space so small temperatures do not underflow.
            let logs: Vec<f64> = p
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if x > 0.0 && mask(i) > 0.0 {
                        x.ln() / params.temperature + mask(i).ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                return Err(Error::ZeroMass);
            }
            logs.iter().map(|l| (l - top).exp()).collect()
        }
        PerturbationForm::Additive => {
            if !(0.0..=1.0).contains(&params.damping) {
                return Err(Error::OutOfRange {
                    name: "damping".into(),
                    value: params.damping,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            let noise = Normal::new(0.0, params.noise_sd)
                .map_err(|e| Error::invalid("noise_sd", e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            p.iter()
                .enumerate()
                .map(|(i, &x)| {
                    let eps = if params.noise_sd > 0.0 {
                        noise.sample(&mut rng)
                    } else {
                        0.0
                    };
                    (x * (1.0 - params.damping) + eps).max(0.0) * mask(i)
                })
                .collect()
        }
    };
    let z: f64 = raw.iter().sum();
    if !(z > 0.0) {
        return Err(Error::ZeroMass);
    }
    Ok(raw.iter().map(|x| x / z).collect())
}

/// Cosine similarity below `threshold` marks the candidate as a leap.
pub fn semantic_gate(context: &[f64], candidate: &[f64], threshold: f64) -> Result<bool> {
    if context.len() != candidate.len() {
        return Err(Error::LengthMismatch {
            left: context.len(),
            right: candidate.len(),
        });
    }
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let (sc, sw) = (sq(context), sq(candidate));
    if sc == 0.0 || sw == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = context.iter().zip(candidate).map(|(a, b)| a * b).sum();
    Ok(dot / (sc * sw).sqrt() < threshold)
}
