//! Cognitive dimension registry, score vectors and per-day persona states.
//!
//! A [`CognitiveVector`] is a dense score record over an ordered
//! [`DimensionRegistry`]. Scores live in `[-1, 1]`; a dimension that a report
//! never mentions simply holds `0.0`. Registries are shared through [`Arc`] so
//! that vectors from the same ingest run can be compared cheaply.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The canonical 17 labels: eight basic emotions, four regulation states,
/// four market-specific states and an overall valence channel.
pub const DEFAULT_DIMENSIONS: [&str; 17] = [
    "joy",
    "sadness",
    "anger",
    "fear",
    "trust",
    "disgust",
    "surprise",
    "anticipation",
    "intensity",
    "agency",
    "certainty",
    "temporality",
    "fomo",
    "greed",
    "regret",
    "uncertainty",
    "valence",
];

/// Tag carried by comment-level inputs that show reflection on one's own reasoning.
pub const TAG_METACOGNITION: &str = "TAG_METACOGNITION";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionRegistry {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

pub type Registry = Arc<DimensionRegistry>;

impl DimensionRegistry {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyRegistry);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.trim().is_empty() {
                return Err(Error::EmptyLabel);
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn shared(self) -> Registry {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Returns a registry with `extra` labels appended after the existing ones.
    /// Labels already present are skipped.
    pub fn extended_with<'a, I>(&self, extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut labels = self.labels.clone();
        for label in extra {
            if !self.contains(label) && !labels.iter().any(|l| l == label) {
                labels.push(label.to_string());
            }
        }
        Self::new(labels)
    }
}

impl Default for DimensionRegistry {
    fn default() -> Self {
        Self::new(DEFAULT_DIMENSIONS).expect("canonical labels are unique")
    }
}

/// How out-of-range scores are treated on construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScorePolicy {
    pub clamp_on_ingest: bool,
}

impl ScorePolicy {
    pub const STRICT: ScorePolicy = ScorePolicy {
        clamp_on_ingest: false,
    };

    pub fn admit(&self, dim: &str, value: f64) -> Result<f64> {
        if !value.is_finite() {
            return Err(Error::ScoreOutOfRange {
                dim: dim.to_string(),
                value,
            });
        }
        if (-1.0..=1.0).contains(&value) {
            Ok(value)
        } else if self.clamp_on_ingest {
            Ok(value.clamp(-1.0, 1.0))
        } else {
            Err(Error::ScoreOutOfRange {
                dim: dim.to_string(),
                value,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CognitiveVector {
    registry: Registry,
    scores: Vec<f64>,
}

impl CognitiveVector {
    pub fn zeros(registry: &Registry) -> Self {
        Self {
            registry: Arc::clone(registry),
            scores: vec![0.0; registry.len()],
        }
    }

    /// Builds a vector from `(dimension, score)` pairs. Later pairs overwrite
    /// earlier ones for the same dimension.
    pub fn from_pairs<I, S>(registry: &Registry, pairs: I, policy: ScorePolicy) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut v = Self::zeros(registry);
        for (dim, score) in pairs {
            let dim = dim.as_ref();
            let idx = registry
                .index_of(dim)
                .ok_or_else(|| Error::UnknownDimension(dim.to_string()))?;
            v.scores[idx] = policy.admit(dim, score)?;
        }
        Ok(v)
    }

    /// Dense constructor; `scores` must follow registry order.
    pub fn from_dense(registry: &Registry, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != registry.len() {
            return Err(Error::LengthMismatch {
                left: scores.len(),
                right: registry.len(),
            });
        }
        for (label, &s) in registry.labels().iter().zip(&scores) {
            ScorePolicy::STRICT.admit(label, s)?;
        }
        Ok(Self {
            registry: Arc::clone(registry),
            scores,
        })
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Score for `dim`, or `None` when the registry lacks it.
    pub fn get(&self, dim: &str) -> Option<f64> {
        self.registry.index_of(dim).map(|i| self.scores[i])
    }

    /// Score for `dim`, with unknown dimensions reading as zero.
    pub fn score_or_zero(&self, dim: &str) -> f64 {
        self.get(dim).unwrap_or(0.0)
    }

    pub fn with_score(&self, dim: &str, value: f64) -> Result<Self> {
        let idx = self
            .registry
            .index_of(dim)
            .ok_or_else(|| Error::UnknownDimension(dim.to_string()))?;
        let mut next = self.clone();
        next.scores[idx] = ScorePolicy::STRICT.admit(dim, value)?;
        Ok(next)
    }

    /// Clamps `value` into range; used by the evolution operators, which are
    /// defined to saturate rather than fail.
    pub(crate) fn set_clamped(&mut self, idx: usize, value: f64) {
        self.scores[idx] = value.clamp(-1.0, 1.0);
    }

    pub fn same_registry(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.registry, &other.registry) || self.registry == other.registry
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.registry
            .labels()
            .iter()
            .map(String::as_str)
            .zip(self.scores.iter().copied())
    }

    /// Re-expresses the vector over `target`. Every non-zero score must have a
    /// home in the target registry.
    pub fn project(&self, target: &Registry) -> Result<Self> {
        let mut out = Self::zeros(target);
        for (dim, s) in self.iter() {
            match target.index_of(dim) {
                Some(i) => out.scores[i] = s,
                None if s == 0.0 => {}
                None => return Err(Error::UnknownDimension(dim.to_string())),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Persona {
    Novice,
    Veteran,
}

impl Persona {
    pub fn as_str(&self) -> &'static str {
        match self {
            Persona::Novice => "novice",
            Persona::Veteran => "veteran",
        }
    }
}

impl fmt::Display for Persona {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Persona {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "novice" | "persona_novice" => Ok(Persona::Novice),
            "veteran" | "persona_veteran" => Ok(Persona::Veteran),
            other => Err(Error::parse(
                "persona",
                format!("unknown persona `{other}`"),
            )),
        }
    }
}

/// One decoded comment: its persona, score vector and metacognition tag.
#[derive(Debug, Clone, PartialEq)]
pub struct CommentVector {
    pub persona: Persona,
    pub vector: CognitiveVector,
    pub metacognitive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersonaDayState {
    pub date: NaiveDate,
    pub novice: CognitiveVector,
    pub veteran: CognitiveVector,
    pub metacognition_score: f64,
    /// Set when no novice input existed and `novice` is the zero vector.
    pub novice_missing: bool,
    pub veteran_missing: bool,
}

impl PersonaDayState {
    pub fn new(
        date: NaiveDate,
        novice: CognitiveVector,
        veteran: CognitiveVector,
        metacognition_score: f64,
    ) -> Result<Self> {
        if !novice.same_registry(&veteran) {
            return Err(Error::MixedRegistries);
        }
        if !(0.0..=1.0).contains(&metacognition_score) {
            return Err(Error::invalid(
                "metacognition_score",
                format!("{metacognition_score} outside [0, 1]"),
            ));
        }
        Ok(Self {
            date,
            novice,
            veteran,
            metacognition_score,
            novice_missing: false,
            veteran_missing: false,
        })
    }

    pub fn persona(&self, p: Persona) -> &CognitiveVector {
        match p {
            Persona::Novice => &self.novice,
            Persona::Veteran => &self.veteran,
        }
    }

    pub fn registry(&self) -> &Registry {
        self.novice.registry()
    }
}

/// Consolidates comment-level vectors into one persona-stratified day state.
///
/// Each persona's vector is the per-dimension arithmetic mean over that
/// persona's inputs. A persona without inputs gets the zero vector and its
/// `*_missing` flag set. The metacognition score is the tagged fraction of all
/// inputs (0 when there are none).
pub fn aggregate_daily(
    registry: &Registry,
    date: NaiveDate,
    inputs: &[CommentVector],
) -> Result<PersonaDayState> {
    let dims = registry.len();
    let mut sums = [vec![0.0; dims], vec![0.0; dims]];
    let mut counts = [0usize; 2];
    let mut tagged = 0usize;
    let probe = CognitiveVector::zeros(registry);

    for input in inputs {
        if !input.vector.same_registry(&probe) {
            return Err(Error::MixedRegistries);
        }
        let slot = match input.persona {
            Persona::Novice => 0,
            Persona::Veteran => 1,
        };
        counts[slot] += 1;
        for (acc, s) in sums[slot].iter_mut().zip(input.vector.scores()) {
            *acc += s;
        }
        if input.metacognitive {
            tagged += 1;
        }
    }

    let mean = |slot: usize| -> CognitiveVector {
        let mut v = CognitiveVector::zeros(registry);
        if counts[slot] > 0 {
            let n = counts[slot] as f64;
            for (dst, acc) in v.scores.iter_mut().zip(&sums[slot]) {
                *dst = acc / n;
            }
        }
        v
    };

    let meta = if inputs.is_empty() {
        0.0
    } else {
        tagged as f64 / inputs.len() as f64
    };
    let mut state = PersonaDayState::new(date, mean(0), mean(1), meta)?;
    state.novice_missing = counts[0] == 0;
    state.veteran_missing = counts[1] == 0;
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bias {
    LossAversion,
    Recency,
    Overconfidence,
    Herding,
    Anchoring,
    Confirmation,
    DispositionEffect,
    Availability,
}

impl Bias {
    pub const ALL: [Bias; 8] = [
        Bias::LossAversion,
        Bias::Recency,
        Bias::Overconfidence,
        Bias::Herding,
        Bias::Anchoring,
        Bias::Confirmation,
        Bias::DispositionEffect,
        Bias::Availability,
    ];

    pub fn as_enum_str(&self) -> &'static str {
        match self {
            Bias::LossAversion => "BIAS_LOSS_AVERSION",
            Bias::Recency => "BIAS_RECENCY",
            Bias::Overconfidence => "BIAS_OVERCONFIDENCE",
            Bias::Herding => "BIAS_HERDING",
            Bias::Anchoring => "BIAS_ANCHORING",
            Bias::Confirmation => "BIAS_CONFIRMATION",
            Bias::DispositionEffect => "BIAS_DISPOSITION_EFFECT",
            Bias::Availability => "BIAS_AVAILABILITY",
        }
    }
}

impl FromStr for Bias {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Bias::ALL
            .into_iter()
            .find(|b| b.as_enum_str() == s)
            .ok_or_else(|| Error::UnknownBias(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DailySentimentReport {
    pub date: NaiveDate,
    pub model_version: Option<String>,
    pub overall_sentiment_index: f64,
    pub dominant_emotions: Vec<(String, f64)>,
    pub persona_day: PersonaDayState,
    pub diagnosed_biases: Vec<Bias>,
    pub narrative_topics: Vec<String>,
}
