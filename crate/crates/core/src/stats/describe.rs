//! Moments and Shannon entropy.
//!
//! All spread measures use the population (`n`) divisor.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    /// `sd / mean`; `None` when the mean is zero and the sample is not constant.
    pub cv: Option<f64>,
    /// `None` for a constant sample.
    pub skewness: Option<f64>,
    pub kurtosis_excess: Option<f64>,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn population_sd(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

pub fn moments(x: &[f64]) -> Result<Moments> {
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Undefined("non-finite sample value".into()));
    }
    let n = x.len() as f64;
    let m = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let sd = m2.sqrt();
    // Relative tolerance so rounding noise on a constant sample is not read as spread.
    let constant = sd <= 1e-14 * m.abs().max(1.0);
    let (sd, skewness, kurtosis_excess) = if constant {
        (0.0, None, None)
    } else {
        (sd, Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
    };
    let cv = if sd == 0.0 {
        Some(0.0)
    } else if m == 0.0 {
        None
    } else {
        Some(sd / m)
    };
    Ok(Moments {
        n: x.len(),
        mean: m,
        sd,
        cv,
        skewness,
        kurtosis_excess,
    })
}

/// Shannon entropy (natural log) of a category-count vector.
pub fn entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::ZeroMass);
    }
    let total = total as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum())
}

/// Entropy of the empirical distribution of `items`.
pub fn entropy_of<T: Ord>(items: &[T]) -> Result<f64> {
    let mut counts = std::collections::BTreeMap::new();
    for it in items {
        *counts.entry(it).or_insert(0u64) += 1;
    }
    entropy(&counts.into_values().collect::<Vec<_>>())
}
