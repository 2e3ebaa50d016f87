use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{mean, population_sd, Histogram};

use super::segment::segment_sentences;

/// Word lists used in place of a part-of-speech tagger. Densities and ratios
/// are relative to these lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicons {
    pub adjectives: BTreeSet<String>,
    pub nouns: BTreeSet<String>,
    pub verbs: BTreeSet<String>,
    pub interjections: BTreeSet<String>,
    /// Phrase to polarity score.
    pub sentiment: BTreeMap<String, f64>,
}

pub const LEXICON_FILES: [&str; 5] = [
    "adjectives.txt",
    "nouns.txt",
    "verbs.txt",
    "interjections.txt",
    "sentiment.tsv",
];

fn phrases(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Lines of `phrase<TAB>score`; a bare phrase scores 1.
pub fn parse_sentiment_lexicon(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let phrase = parts.next().unwrap_or_default().trim();
        let score = match parts.next() {
            Some(s) => s.trim().parse::<f64>().map_err(|_| {
                Error::parse(
                    format!("sentiment lexicon line {}", i + 1),
                    format!("bad score {s:?}"),
                )
            })?,
            None => 1.0,
        };
        out.insert(phrase.to_string(), score);
    }
    Ok(out)
}

impl Lexicons {
    pub fn from_texts(
        adjectives: &str,
        nouns: &str,
        verbs: &str,
        interjections: &str,
        sentiment: &str,
    ) -> Result<Self> {
        Ok(Lexicons {
            adjectives: phrases(adjectives),
            nouns: phrases(nouns),
            verbs: phrases(verbs),
            interjections: phrases(interjections),
            sentiment: parse_sentiment_lexicon(sentiment)?,
        })
    }

    /// Reads the five lexicon files from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| Error::Io { path, source })
        };
        Self::from_texts(
            &read(LEXICON_FILES[0])?,
            &read(LEXICON_FILES[1])?,
            &read(LEXICON_FILES[2])?,
            &read(LEXICON_FILES[3])?,
            &read(LEXICON_FILES[4])?,
        )
    }

    pub fn builtin() -> Self {
        Self::from_texts(
            include_str!("../../data/lexicon/adjectives.txt"),
            include_str!("../../data/lexicon/nouns.txt"),
            include_str!("../../data/lexicon/verbs.txt"),
            include_str!("../../data/lexicon/interjections.txt"),
            include_str!("../../data/lexicon/sentiment.tsv"),
        )
        .expect("bundled lexicons parse")
    }

    fn vocabulary(&self) -> BTreeSet<&str> {
        self.adjectives
            .iter()
            .chain(&self.nouns)
            .chain(&self.verbs)
            .chain(&self.interjections)
            .chain(self.sentiment.keys())
            .map(String::as_str)
            .collect()
    }
}

/// Greedy longest-match tokenizer over the lexicon vocabulary. Unmatched CJK
/// characters become single-character tokens, ASCII alphanumeric runs become
/// one token, punctuation and whitespace are skipped.
pub fn tokenize<'a>(text: &'a str, lex: &Lexicons) -> Vec<&'a str> {
    let vocab = lex.vocabulary();
    let longest = vocab.iter().map(|w| w.chars().count()).max().unwrap_or(1);
    let idx: Vec<usize> = text
        .char_indices()
        .map(|(i, _)| i)
        .chain([text.len()])
        .collect();
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || (!c.is_alphanumeric()) {
            i += 1;
            continue;
        }
        let upto = (i + longest).min(chars.len());
        let hit = (i + 1..=upto)
            .rev()
            .find(|&j| vocab.contains(&text[idx[i]..idx[j]]));
        let end = match hit {
            Some(j) => j,
            None if c.is_ascii_alphanumeric() => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                j
            }
            None => i + 1,
        };
        out.push(&text[idx[i]..idx[end]]);
        i = end;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SentenceLengthSd,
    AdjectiveDensity,
    NounVerbRatio,
    InterjectionCount,
    AvgSentenceLength,
    SentimentVolatility,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::SentenceLengthSd,
        Metric::AdjectiveDensity,
        Metric::NounVerbRatio,
        Metric::InterjectionCount,
        Metric::AvgSentenceLength,
        Metric::SentimentVolatility,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Metric::SentenceLengthSd => "Sentence Length SD",
            Metric::AdjectiveDensity => "Adjective Density",
            Metric::NounVerbRatio => "Noun-Verb Ratio",
            Metric::InterjectionCount => "Interjection Count",
            Metric::AvgSentenceLength => "Avg Sentence Length",
            Metric::SentimentVolatility => "Sentiment Volatility",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TextMetrics {
    pub avg_sentence_length: f64,
    pub sentence_length_sd: f64,
    pub adjective_density: f64,
    /// Noun hits over verb hits, with the denominator floored at one.
    pub noun_verb_ratio: f64,
    pub interjection_count: f64,
    pub sentiment_volatility: f64,
}

impl TextMetrics {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::SentenceLengthSd => self.sentence_length_sd,
            Metric::AdjectiveDensity => self.adjective_density,
            Metric::NounVerbRatio => self.noun_verb_ratio,
            Metric::InterjectionCount => self.interjection_count,
            Metric::AvgSentenceLength => self.avg_sentence_length,
            Metric::SentimentVolatility => self.sentiment_volatility,
        }
    }
}

pub fn text_metrics(text: &str, lex: &Lexicons) -> TextMetrics {
    let sentences = segment_sentences(text);
    let lengths: Vec<f64> = sentences.iter().map(|s| s.len as f64).collect();
    let (avg, sd) = if lengths.is_empty() {
        (0.0, 0.0)
    } else {
        (mean(&lengths), population_sd(&lengths))
    };

    let tokens = tokenize(text, lex);
    let count = |set: &BTreeSet<String>| tokens.iter().filter(|t| set.contains(**t)).count();
    let adjective_density = if tokens.is_empty() {
        0.0
    } else {
        count(&lex.adjectives) as f64 / tokens.len() as f64
    };
    let noun_verb_ratio = count(&lex.nouns) as f64 / count(&lex.verbs).max(1) as f64;

    let scores: Vec<f64> = sentences
        .iter()
        .map(|s| {
            tokenize(&s.text, lex)
                .iter()
                .filter_map(|t| lex.sentiment.get(*t))
                .sum()
        })
        .collect();
    let sentiment_volatility = if scores.is_empty() {
        0.0
    } else {
        population_sd(&scores)
    };

    TextMetrics {
        avg_sentence_length: avg,
        sentence_length_sd: sd,
        adjective_density,
        noun_verb_ratio,
        interjection_count: count(&lex.interjections) as f64,
        sentiment_volatility,
    }
}

/// Per-text metric samples for a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fingerprint {
    pub samples: BTreeMap<Metric, Vec<f64>>,
}

impl Fingerprint {
    pub fn sample(&self, m: Metric) -> Option<&[f64]> {
        self.samples.get(&m).map(Vec::as_slice)
    }
}

pub fn fingerprint<S: AsRef<str>>(corpus: &[S], lex: &Lexicons) -> Result<Fingerprint> {
    if corpus.is_empty() {
        return Err(Error::NoInput("corpus".into()));
    }
    let per_text: Vec<TextMetrics> = corpus
        .iter()
        .map(|t| text_metrics(t.as_ref(), lex))
        .collect();
    let samples = Metric::ALL
        .into_iter()
        .map(|m| (m, per_text.iter().map(|t| t.get(m)).collect()))
        .collect();
    Ok(Fingerprint { samples })
}

pub const DEFAULT_BINS: usize = 20;

/// Jensen-Shannon divergence per metric over shared equal-width bins.
pub fn compare_corpora(
    a: &Fingerprint,
    b: &Fingerprint,
    bins: usize,
) -> Result<Vec<(Metric, f64)>> {
    let keys_a: Vec<&Metric> = a.samples.keys().collect();
    let keys_b: Vec<&Metric> = b.samples.keys().collect();
    if keys_a != keys_b {
        return Err(Error::Misaligned(
            "fingerprints carry different metrics".into(),
        ));
    }
    let mut out = Vec::with_capacity(keys_a.len());
    for (m, xa) in &a.samples {
        let xb = &b.samples[m];
        let all_same = xa.iter().chain(xb).all(|v| *v == xa[0]);
        let jsd = if all_same {
            0.0
        } else {
            let (ha, hb) = Histogram::pooled_pair(xa, xb, bins)?;
            ha.js_divergence(&hb)?
        };
        out.push((*m, jsd));
    }
    Ok(out)
}
