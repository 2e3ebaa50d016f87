//! Template-backed synthetic comment generator. Sentence lengths follow the
//! oscillation schedule, and `i_rhythm` drives both its amplitude and the
//! rate at which sentences are broken into fragments.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cogvec::Persona;
use crate::error::{Error, Result};

use super::oscillation::{oscillation_schedule, OscillationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlangCategory {
    Despair,
    Denial,
    Euphoria,
    Cynicism,
}

impl SlangCategory {
    pub const ALL: [SlangCategory; 4] = [
        SlangCategory::Despair,
        SlangCategory::Denial,
        SlangCategory::Euphoria,
        SlangCategory::Cynicism,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SlangCategory::Despair => "despair",
            SlangCategory::Denial => "denial",
            SlangCategory::Euphoria => "euphoria",
            SlangCategory::Cynicism => "cynicism",
        }
    }
}

impl FromStr for SlangCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SlangCategory::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::parse("slang category", format!("unknown category {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlangEntry {
    pub category: SlangCategory,
    pub phrase: String,
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlangDictionary {
    pub entries: Vec<SlangEntry>,
    pub probability: f64,
}

pub const DEFAULT_SLANG_PROBABILITY: f64 = 0.3;

impl SlangDictionary {
    /// Lines of `category<TAB>phrase<TAB>tag`; `#` starts a comment line.
    pub fn parse(text: &str, probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::OutOfRange {
                name: "slang probability".into(),
                value: probability,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() < 2 || cols[1].is_empty() {
                return Err(Error::parse(
                    format!("slang line {}", i + 1),
                    "expected category<TAB>phrase[<TAB>tag]",
                ));
            }
            entries.push(SlangEntry {
                category: cols[0].parse()?,
                phrase: cols[1].to_string(),
                tag: cols.get(2).copied().unwrap_or_default().to_string(),
            });
        }
        if entries.is_empty() {
            return Err(Error::NoInput("slang dictionary".into()));
        }
        Ok(SlangDictionary {
            entries,
            probability,
        })
    }

    pub fn builtin() -> Self {
        Self::parse(
            include_str!("../../data/slang.tsv"),
            DEFAULT_SLANG_PROBABILITY,
        )
        .expect("bundled slang parses")
    }

    pub fn category(&self, c: SlangCategory) -> Vec<&SlangEntry> {
        self.entries.iter().filter(|e| e.category == c).collect()
    }
}

/// Clause templates keyed by persona and emotion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TemplateBank {
    cells: BTreeMap<(String, String), Vec<String>>,
}

impl TemplateBank {
    /// `[persona.emotion]` headers followed by one clause per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cells: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
        let mut current: Option<(String, String)> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let (p, e) = header.split_once('.').ok_or_else(|| {
                    Error::parse(
                        format!("template line {}", i + 1),
                        "header must be [persona.emotion]",
                    )
                })?;
                let persona = p.trim().parse::<Persona>()?;
                let key = (persona.as_str().to_string(), e.trim().to_string());
                cells.entry(key.clone()).or_default();
                current = Some(key);
                continue;
            }
            let key = current.as_ref().ok_or_else(|| {
                Error::parse(
                    format!("template line {}", i + 1),
                    "template before any section header",
                )
            })?;
            cells
                .get_mut(key)
                .expect("section registered")
                .push(line.to_string());
        }
        Ok(TemplateBank { cells })
    }

    pub fn builtin() -> Self {
        Self::parse(include_str!("../../data/templates.txt")).expect("bundled templates parse")
    }

    pub fn cell(&self, persona: Persona, emotion: &str) -> &[String] {
        self.cells
            .get(&(persona.as_str().to_string(), emotion.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    fn emotions_for(&self, persona: Persona) -> Vec<&str> {
        self.cells
            .iter()
            .filter(|((p, _), v)| p == persona.as_str() && !v.is_empty())
            .map(|((_, e), _)| e.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarketCondition {
    Crash,
    Rally,
    Sideways,
}

impl MarketCondition {
    /// Emotion mix the comments are drawn from.
    pub fn emotion_weights(&self) -> &'static [(&'static str, f64)] {
        match self {
            MarketCondition::Crash => &[
                ("fear", 0.4),
                ("sadness", 0.25),
                ("regret", 0.2),
                ("anger", 0.15),
            ],
            MarketCondition::Rally => &[("joy", 0.4), ("greed", 0.3), ("anticipation", 0.3)],
            MarketCondition::Sideways => &[
                ("uncertainty", 0.5),
                ("anticipation", 0.2),
                ("sadness", 0.3),
            ],
        }
    }
}

impl fmt::Display for MarketCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarketCondition::Crash => "crash",
            MarketCondition::Rally => "rally",
            MarketCondition::Sideways => "sideways",
        })
    }
}

impl FromStr for MarketCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "crash" => Ok(MarketCondition::Crash),
            "rally" => Ok(MarketCondition::Rally),
            "sideways" => Ok(MarketCondition::Sideways),
            other => Err(Error::parse(
                "market condition",
                format!("unknown condition {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationContext {
    pub condition: MarketCondition,
    pub event: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Physics {
    /// Rhythm volatility in [0, 1.5].
    pub i_rhythm: f64,
    /// Chance that a filler clause comes from another emotion.
    pub p_leap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceShape {
    /// Schedule at `i_rhythm = 1`; amplitude and noise scale with it.
    pub oscillation: OscillationParams,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub fragment_cap: f64,
}

impl Default for SentenceShape {
    fn default() -> Self {
        SentenceShape {
            oscillation: OscillationParams {
                noise_sd: 3.0,
                ..OscillationParams::default()
            },
            min_sentences: 2,
            max_sentences: 5,
            fragment_cap: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub context: GenerationContext,
    pub persona_mix: Vec<(Persona, f64)>,
    pub physics: Physics,
    pub shape: SentenceShape,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyntheticComment {
    pub index: usize,
    pub persona: Persona,
    pub emotion: String,
    pub text: String,
    pub has_slang: bool,
    pub slang_category: Option<SlangCategory>,
}

const CONNECTIVES: [&str; 8] = [
    "但是", "因为", "所以", "然后", "而且", "结果", "不过", "可是",
];

fn pick_weighted<'a, T>(rng: &mut impl Rng, items: &'a [(T, f64)]) -> &'a T {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut u = rng.random::<f64>() * total;
    for (item, w) in items {
        if u < *w {
            return item;
        }
        u -= w;
    }
    &items.last().expect("non-empty weights").0
}

fn slang_category_for(persona: Persona, emotion: &str, rng: &mut impl Rng) -> SlangCategory {
    if persona == Persona::Veteran && rng.random_bool(0.5) {
        return SlangCategory::Cynicism;
    }
    match emotion {
        "fear" | "sadness" | "regret" => SlangCategory::Despair,
        "joy" | "greed" | "anticipation" => SlangCategory::Euphoria,
        _ => SlangCategory::Denial,
    }
}

fn terminator(emotion: &str, rng: &mut impl Rng) -> char {
    let bang = match emotion {
        "fear" | "anger" | "greed" | "joy" => 0.7,
        "uncertainty" => 0.1,
        _ => 0.3,
    };
    if emotion == "uncertainty" && rng.random_bool(0.6) {
        '？'
    } else if rng.random_bool(bang) {
        '！'
    } else {
        '。'
    }
}

fn strip_connective(s: &str) -> &str {
    let t = s.trim_start_matches('，');
    CONNECTIVES
        .iter()
        .find_map(|c| t.strip_prefix(c))
        .unwrap_or(t)
        .trim_start_matches('，')
}

fn take_chars(s: &str, n: usize) -> String {
    s.chars().take(n).collect()
}

fn validate(req: &GenerationRequest, slang: &SlangDictionary, bank: &TemplateBank) -> Result<()> {
    if req.persona_mix.is_empty() || req.persona_mix.iter().any(|(_, w)| !(*w >= 0.0)) {
        return Err(Error::invalid(
            "persona_mix",
            "weights must be non-negative",
        ));
    }
    let total: f64 = req.persona_mix.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized(total));
    }
    let p = &req.physics;
    if !(0.0..=1.5).contains(&p.i_rhythm) {
        return Err(Error::OutOfRange {
            name: "i_rhythm".into(),
            value: p.i_rhythm,
            lo: 0.0,
            hi: 1.5,
        });
    }
    if !(0.0..=1.0).contains(&p.p_leap) {
        return Err(Error::OutOfRange {
            name: "p_leap".into(),
            value: p.p_leap,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let s = &req.shape;
    if s.min_sentences == 0 || s.min_sentences > s.max_sentences {
        return Err(Error::invalid(
            "shape",
            "need 1 <= min_sentences <= max_sentences",
        ));
    }
    if !(0.0..=1.0).contains(&s.fragment_cap) {
        return Err(Error::invalid("fragment_cap", "must lie in [0, 1]"));
    }
    s.oscillation.validate()?;
    if !(0.0..=1.0).contains(&slang.probability) {
        return Err(Error::invalid("slang probability", "must lie in [0, 1]"));
    }
    for (persona, w) in &req.persona_mix {
        if *w == 0.0 {
            continue;
        }
        for (emotion, _) in req.context.condition.emotion_weights() {
            if bank.cell(*persona, emotion).is_empty() {
                return Err(Error::Config(format!(
                    "no templates for [{persona}.{emotion}]"
                )));
            }
        }
    }
    Ok(())
}

struct CommentBuilder<'a> {
    req: &'a GenerationRequest,
    bank: &'a TemplateBank,
    persona: Persona,
    emotion: &'a str,
    slang_phrase: Option<String>,
    slang_placed: bool,
}

impl CommentBuilder<'_> {
    fn clause(&mut self, rng: &mut impl Rng) -> String {
        let emotion = if rng.random_bool(self.req.physics.p_leap) {
            let others = self.bank.emotions_for(self.persona);
            others[rng.random_range(0..others.len())].to_string()
        } else {
            self.emotion.to_string()
        };
        let cell = self.bank.cell(self.persona, &emotion);
        let raw = &cell[rng.random_range(0..cell.len())];
        let mut text = raw.replace("{event}", &self.req.context.event);
        if text.contains("{slang}") {
            let fill = match (&self.slang_phrase, self.slang_placed) {
                (Some(p), false) => {
                    self.slang_placed = true;
                    format!("{p}，")
                }
                _ => String::new(),
            };
            text = text.replace("{slang}", &fill);
        }
        text
    }

    /// A sentence of exactly `target` characters built from clauses.
    fn sentence(&mut self, target: usize, rng: &mut impl Rng) -> String {
        let mut s = self.clause(rng);
        while s.chars().count() < target {
            s.push('，');
            s.push_str(&self.clause(rng));
        }
        take_chars(&s, target).trim_end_matches('，').to_string()
    }
}

/// Breaks a sentence in two, cutting nearer the start so one short piece
/// and one long piece come out, then drops a leading connective.
fn fragment(s: &str, rng: &mut impl Rng) -> Vec<String> {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() < 4 {
        return vec![s.to_string()];
    }
    let u: f64 = rng.random();
    let cut = 1 + ((chars.len() - 2) as f64 * u * u) as usize;
    let head: String = chars[..cut].iter().collect();
    let tail: String = chars[cut..].iter().collect();
    [
        head.trim_end_matches('，').to_string(),
        strip_connective(&tail).to_string(),
    ]
    .into_iter()
    .filter(|p| !p.is_empty())
    .collect()
}

/// Beyond `i_rhythm = 1` sentences may collapse into bursts of one or two
/// characters.
fn burst(s: &str, rng: &mut impl Rng) -> Vec<String> {
    let chars: Vec<char> = s.chars().filter(|c| *c != '，').collect();
    let k = rng.random_range(2..=5);
    (0..k)
        .map(|i| {
            let w = rng.random_range(1..=2);
            chars.iter().cycle().skip(i).take(w).collect()
        })
        .collect()
}

fn one_comment(
    index: usize,
    req: &GenerationRequest,
    slang: &SlangDictionary,
    bank: &TemplateBank,
) -> Result<SyntheticComment> {
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    rng.set_stream(index as u64);

    let persona = *pick_weighted(&mut rng, &req.persona_mix);
    let emotion = *pick_weighted(&mut rng, req.context.condition.emotion_weights());
    let has_slang = rng.random_bool(slang.probability);
    let (slang_phrase, slang_category) = if has_slang {
        let cat = slang_category_for(persona, emotion, &mut rng);
        let options = slang.category(cat);
        let pool = if options.is_empty() {
            slang.entries.iter().collect()
        } else {
            options
        };
        let entry = pool[rng.random_range(0..pool.len())];
        (Some(entry.phrase.clone()), Some(entry.category))
    } else {
        (None, None)
    };

    let i_rhythm = req.physics.i_rhythm;
    let base = &req.shape.oscillation;
    let schedule = OscillationParams {
        amplitude: base.amplitude * i_rhythm,
        noise_sd: base.noise_sd * i_rhythm,
        phase: rng.random::<f64>() * TAU,
        ..*base
    };
    let k = rng.random_range(req.shape.min_sentences..=req.shape.max_sentences);
    let targets = oscillation_schedule(&schedule, k, rng.next_u64())?;
    let split_p = i_rhythm.min(req.shape.fragment_cap);
    let burst_p = (i_rhythm - 1.0).clamp(0.0, 1.0);

    let mut builder = CommentBuilder {
        req,
        bank,
        persona,
        emotion,
        slang_phrase: slang_phrase.clone(),
        slang_placed: false,
    };
    let mut pieces: Vec<String> = Vec::new();
    for target in targets {
        let s = builder.sentence(target, &mut rng);
        if rng.random_bool(burst_p) {
            pieces.extend(burst(&s, &mut rng));
        } else if rng.random_bool(split_p) {
            pieces.extend(fragment(&s, &mut rng));
        } else {
            pieces.push(s);
        }
    }
    // Truncation and fragmenting can cut a slot-filled phrase apart.
    let intact = |p: &str| pieces.iter().any(|s| s.contains(p));
    if let Some(p) = slang_phrase.as_deref().filter(|p| !intact(p)) {
        let p = p.to_string();
        let at = rng.random_range(0..=pieces.len());
        pieces.insert(at, p);
    }

    let mut text = String::new();
    for p in pieces {
        text.push_str(&p);
        let ends_terminated = p.ends_with(super::segment::is_terminator);
        if !ends_terminated {
            text.push(terminator(emotion, &mut rng));
        }
    }
    Ok(SyntheticComment {
        index,
        persona,
        emotion: emotion.to_string(),
        text,
        has_slang,
        slang_category,
    })
}

/// Generates `n` comments. Each comment draws from its own ChaCha stream
/// keyed by `(seed, index)`, so any subset can be regenerated alone.
pub fn generate_synthetic_comments(
    req: &GenerationRequest,
    slang: &SlangDictionary,
    bank: &TemplateBank,
) -> Result<Vec<SyntheticComment>> {
    validate(req, slang, bank)?;
    (0..req.n)
        .map(|i| one_comment(i, req, slang, bank))
        .collect()
}
