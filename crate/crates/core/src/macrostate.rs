//! Macro state: dispersion (MDI), consensus frenzy (MCFI), metacognition,
//! their finite-difference dynamics, and soft quadrant membership.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::cogvec::{CognitiveVector, PersonaDayState};
use crate::error::{Error, Result};

pub const DEFAULT_MCFI_ALPHA: f64 = 0.6;

/// Euclidean distance between the novice and veteran vectors over every
/// registry dimension.
pub fn mdi(state: &PersonaDayState) -> Result<f64> {
    mdi_between(&state.novice, &state.veteran)
}

pub fn mdi_between(novice: &CognitiveVector, veteran: &CognitiveVector) -> Result<f64> {
    if !novice.same_registry(veteran) {
        return Err(Error::MixedRegistries);
    }
    Ok(novice
        .scores()
        .iter()
        .zip(veteran.scores())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

pub fn mcfi(avg_joy: f64, avg_anticipation: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "mcfi alpha".into(),
            value: alpha,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(alpha * avg_joy + (1.0 - alpha) * avg_anticipation)
}

/// MCFI from the cross-persona mean of joy and anticipation. A persona
/// flagged missing is left out of the mean.
pub fn mcfi_of(state: &PersonaDayState, alpha: f64) -> Result<f64> {
    let mut present: Vec<&CognitiveVector> = Vec::with_capacity(2);
    if !state.novice_missing {
        present.push(&state.novice);
    }
    if !state.veteran_missing {
        present.push(&state.veteran);
    }
    if present.is_empty() {
        present = vec![&state.novice, &state.veteran];
    }
    let n = present.len() as f64;
    let joy = present.iter().map(|v| v.score_or_zero("joy")).sum::<f64>() / n;
    let ant = present
        .iter()
        .map(|v| v.score_or_zero("anticipation"))
        .sum::<f64>()
        / n;
    mcfi(joy, ant, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroState {
    pub date: NaiveDate,
    pub mdi: f64,
    pub mcfi: f64,
    pub meta: f64,
}

impl MacroState {
    pub fn from_day(state: &PersonaDayState, alpha: f64) -> Result<Self> {
        Ok(Self {
            date: state.date,
            mdi: mdi(state)?,
            mcfi: mcfi_of(state, alpha)?,
            meta: state.metacognition_score,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MacroDynamics {
    pub v_mdi: Option<f64>,
    pub v_mcfi: Option<f64>,
    pub a_mdi: Option<f64>,
    pub a_mcfi: Option<f64>,
}

/// Lag-`k` velocities and accelerations for each entry of `series`.
pub fn dynamics(series: &[MacroState], k: usize) -> Result<Vec<MacroDynamics>> {
    if k == 0 {
        return Err(Error::invalid("k", "lag must be at least 1"));
    }
    if k >= series.len() {
        return Err(Error::InsufficientData {
            needed: k + 1,
            got: series.len(),
        });
    }
    if let Some(w) = series.windows(2).find(|w| w[1].date <= w[0].date) {
        return Err(Error::Unsorted(w[1].date));
    }
    let kf = k as f64;
    let vel = |f: fn(&MacroState) -> f64| -> Vec<Option<f64>> {
        (0..series.len())
            .map(|t| (t >= k).then(|| (f(&series[t]) - f(&series[t - k])) / kf))
            .collect()
    };
    let v_mdi = vel(|s| s.mdi);
    let v_mcfi = vel(|s| s.mcfi);
    let acc = |v: &[Option<f64>], t: usize| -> Option<f64> {
        if t < k {
            return None;
        }
        Some((v[t]? - v[t - k]?) / kf)
    };
    Ok((0..series.len())
        .map(|t| MacroDynamics {
            v_mdi: v_mdi[t],
            v_mcfi: v_mcfi[t],
            a_mdi: acc(&v_mdi, t),
            a_mcfi: acc(&v_mcfi, t),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuadrantId {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl QuadrantId {
    pub const ALL: [QuadrantId; 6] = [
        QuadrantId::A,
        QuadrantId::B,
        QuadrantId::C,
        QuadrantId::D,
        QuadrantId::E,
        QuadrantId::F,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            QuadrantId::A => "A_FullBubble",
            QuadrantId::B => "B_StructuralTearing",
            QuadrantId::C => "C_DeadFreeze",
            QuadrantId::D => "D_InertialRecession",
            QuadrantId::E => "E_RecessiveTearing",
            QuadrantId::F => "F_StructuralRise",
        }
    }

    pub fn enum_label(&self) -> &'static str {
        match self {
            QuadrantId::A => "MACRO_QUADRANT_FULL_BUBBLE",
            QuadrantId::B => "MACRO_QUADRANT_STRUCTURAL_TEAR",
            QuadrantId::C => "MACRO_QUADRANT_DEAD_FREEZE",
            QuadrantId::D => "MACRO_QUADRANT_INERTIAL_RECESSION",
            QuadrantId::E => "MACRO_QUADRANT_RECESSIVE_TEAR",
            QuadrantId::F => "MACRO_QUADRANT_STRUCTURAL_RISE",
        }
    }

    pub fn letter(&self) -> char {
        (b'A' + *self as u8) as char
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for QuadrantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuadrantId {
    type Err = Error;

    /// Accepts the letter, the short name, or the enum label.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        QuadrantId::ALL
            .into_iter()
            .find(|q| {
                t.eq_ignore_ascii_case(&q.letter().to_string())
                    || t == q.name()
                    || t == q.enum_label()
            })
            .ok_or_else(|| Error::UnknownQuadrant(s.to_string()))
    }
}

/// Feature point used for quadrant membership.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MacroFeatures {
    pub mdi: f64,
    pub mcfi: f64,
    pub v_mdi: f64,
    pub v_mcfi: f64,
    pub meta: f64,
}

impl MacroFeatures {
    pub fn new(state: &MacroState, dyn_: &MacroDynamics) -> Self {
        Self {
            mdi: state.mdi,
            mcfi: state.mcfi,
            v_mdi: dyn_.v_mdi.unwrap_or(0.0),
            v_mcfi: dyn_.v_mcfi.unwrap_or(0.0),
            meta: state.meta,
        }
    }

    fn as_array(&self) -> [f64; 5] {
        [self.mdi, self.mcfi, self.v_mdi, self.v_mcfi, self.meta]
    }

    pub fn squared_distance(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantPrototypes {
    pub bandwidth: f64,
    pub centroids: BTreeMap<QuadrantId, MacroFeatures>,
}

impl Default for QuadrantPrototypes {
    /// Hand-placed centroids following each regime's verbal description.
    fn default() -> Self {
        let f = |mdi, mcfi, v_mdi, v_mcfi, meta| MacroFeatures {
            mdi,
            mcfi,
            v_mdi,
            v_mcfi,
            meta,
        };
        let centroids = BTreeMap::from([
            (QuadrantId::A, f(0.10, 0.70, 0.00, 0.10, 0.20)),
            (QuadrantId::B, f(0.90, 0.20, 0.30, -0.10, 0.20)),
            (QuadrantId::C, f(0.10, 0.00, -0.05, -0.10, 0.10)),
            (QuadrantId::D, f(0.40, 0.10, 0.00, -0.05, 0.15)),
            (QuadrantId::E, f(0.80, 0.05, 0.10, -0.10, 0.15)),
            (QuadrantId::F, f(0.50, 0.50, 0.00, 0.05, 0.25)),
        ]);
        Self {
            bandwidth: 0.5,
            centroids,
        }
    }
}

impl QuadrantPrototypes {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return Err(Error::invalid("bandwidth", "must be positive"));
        }
        for q in QuadrantId::ALL {
            if !self.centroids.contains_key(&q) {
                return Err(Error::Config(format!("missing prototype for {q}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantMembership {
    /// Indexed in `QuadrantId::ALL` order.
    pub probabilities: [f64; 6],
    pub dominant: QuadrantId,
}

impl QuadrantMembership {
    pub fn probability(&self, q: QuadrantId) -> f64 {
        self.probabilities[q.index()]
    }
}

/// Normalizes log-similarities into probabilities and picks the first maximum.
pub fn membership_from_log_similarity(log_s: [f64; 6]) -> QuadrantMembership {
    let max = log_s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights = log_s.map(|l| (l - max).exp());
    let total: f64 = weights.iter().sum();
    let probabilities = weights.map(|w| w / total);
    let mut dominant = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > probabilities[dominant] {
            dominant = i;
        }
    }
    QuadrantMembership {
        probabilities,
        dominant: QuadrantId::ALL[dominant],
    }
}

/// Gaussian-kernel similarity to each prototype, normalized to sum to one.
pub fn quadrant_membership(
    features: &MacroFeatures,
    prototypes: &QuadrantPrototypes,
) -> Result<QuadrantMembership> {
    prototypes.validate()?;
    if features.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::Undefined("non-finite macro feature".into()));
    }
    let two_h2 = 2.0 * prototypes.bandwidth * prototypes.bandwidth;
    let log_s =
        QuadrantId::ALL.map(|q| -features.squared_distance(&prototypes.centroids[&q]) / two_h2);
    Ok(membership_from_log_similarity(log_s))
}
