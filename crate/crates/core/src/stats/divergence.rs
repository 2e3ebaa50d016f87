//! Histograms over shared bins and Jensen-Shannon divergence (base 2).

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::invalid("edges", "need at least two edges"));
        }
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("edges", "must be strictly ascending"));
        }
        let counts = vec![0; edges.len() - 1];
        Ok(Self { edges, counts })
    }

    /// `bins` equal-width bins over `[lo, hi]`. A degenerate range is widened
    /// by half a unit each side.
    pub fn equal_width(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::invalid("bins", "must be positive"));
        }
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::invalid("range", format!("[{lo}, {hi}]")));
        }
        let (lo, hi) = if lo == hi {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        };
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
        edges.push(hi);
        Self::from_edges(edges)
    }

    /// Builds a pair of histograms over the pooled min-max of both samples.
    pub fn pooled_pair(a: &[f64], b: &[f64], bins: usize) -> Result<(Self, Self)> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::NoInput("histogram sample".into()));
        }
        let (lo, hi) = a
            .iter()
            .chain(b)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                (l.min(v), h.max(v))
            });
        let mut ha = Self::equal_width(lo, hi, bins)?;
        let mut hb = ha.clone();
        ha.extend(a);
        hb.extend(b);
        Ok((ha, hb))
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Adds a value. The last bin is closed on the right; values outside the
    /// edges are dropped and reported with `false`.
    pub fn add(&mut self, v: f64) -> bool {
        let last = *self.edges.last().unwrap();
        if !(v >= self.edges[0] && v <= last) {
            return false;
        }
        let bin = if v == last {
            self.counts.len() - 1
        } else {
            self.edges.partition_point(|&e| e <= v) - 1
        };
        self.counts[bin] += 1;
        true
    }

    pub fn extend(&mut self, values: &[f64]) {
        for &v in values {
            self.add(v);
        }
    }

    pub fn mass(&self) -> Result<Vec<f64>> {
        let total = self.total();
        if total == 0 {
            return Err(Error::ZeroMass);
        }
        Ok(self
            .counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect())
    }

    pub fn same_support(&self, other: &Self) -> bool {
        self.edges == other.edges
    }
}

fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &mi)| pi * (pi / mi).log2())
        .sum()
}

/// Jensen-Shannon divergence of two mass functions on the same support.
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch);
    }
    for dist in [p, q] {
        if dist.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid(
                "mass",
                "entries must be finite and non-negative",
            ));
        }
        let s: f64 = dist.iter().sum();
        if (s - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(s));
        }
    }
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let jsd = 0.5 * kl_to_mixture(p, &m) + 0.5 * kl_to_mixture(q, &m);
    Ok(jsd.clamp(0.0, 1.0))
}

impl Histogram {
    pub fn js_divergence(&self, other: &Self) -> Result<f64> {
        if !self.same_support(other) {
            return Err(Error::SupportMismatch);
        }
        js_divergence(&self.mass()?, &other.mass()?)
    }
}
