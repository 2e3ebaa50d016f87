//! Daily sentiment report documents: JSON with optional `//` line comments,
//! one per file or several per stream.

use chrono::NaiveDate;
use serde_json::{json, Map, Value};

use crate::cogvec::{
    aggregate_daily, Bias, CognitiveVector, CommentVector, DailySentimentReport, DimensionRegistry,
    Persona, PersonaDayState, Registry, ScorePolicy, TAG_METACOGNITION,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RegistryMode {
    /// Unknown dimension names are errors.
    #[default]
    Strict,
    /// Unknown dimension names are appended to the registry.
    Extensible,
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub registry: Registry,
    pub mode: RegistryMode,
    pub policy: ScorePolicy,
    /// Used when a document carries no date of its own.
    pub fallback_date: Option<NaiveDate>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            registry: DimensionRegistry::default().shared(),
            mode: RegistryMode::Strict,
            policy: ScorePolicy::STRICT,
            fallback_date: None,
        }
    }
}

/// Removes `//` comments that sit outside string literals.
pub fn strip_line_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    let mut in_string = false;
    let mut escaped = false;
    while let Some(c) = chars.next() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => {
                in_string = true;
                out.push(c);
            }
            '/' if chars.peek() == Some(&'/') => {
                for skipped in chars.by_ref() {
                    if skipped == '\n' {
                        out.push('\n');
                        break;
                    }
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Splits a stream into JSON documents (newline-delimited or concatenated).
pub fn split_documents(text: &str) -> Result<Vec<Value>> {
    let clean = strip_line_comments(text);
    let mut docs = Vec::new();
    for (i, doc) in serde_json::Deserializer::from_str(&clean)
        .into_iter::<Value>()
        .enumerate()
    {
        docs.push(
            doc.map_err(|e| Error::parse(format!("report document {}", i + 1), e.to_string()))?,
        );
    }
    if docs.is_empty() {
        return Err(Error::NoInput("report stream".into()));
    }
    Ok(docs)
}

pub fn parse_csd_report(text: &str, opts: &ParseOptions) -> Result<DailySentimentReport> {
    let docs = split_documents(text)?;
    if docs.len() != 1 {
        return Err(Error::parse(
            "report",
            format!("expected one document, found {}", docs.len()),
        ));
    }
    let registry = resolve_registry(&docs, opts)?;
    report_from_value(&docs[0], &registry, opts)
}

/// Parses every document in a stream against one registry. In extensible
/// mode the registry is the union of all labels seen.
pub fn parse_report_stream(text: &str, opts: &ParseOptions) -> Result<Vec<DailySentimentReport>> {
    let docs = split_documents(text)?;
    let registry = resolve_registry(&docs, opts)?;
    docs.iter()
        .map(|d| report_from_value(d, &registry, opts))
        .collect()
}

fn resolve_registry(docs: &[Value], opts: &ParseOptions) -> Result<Registry> {
    match opts.mode {
        RegistryMode::Strict => Ok(opts.registry.clone()),
        RegistryMode::Extensible => {
            let mut labels = Vec::new();
            for d in docs {
                collect_dimensions(d, &mut labels);
            }
            Ok(opts
                .registry
                .extended_with(labels.iter().map(String::as_str))?
                .shared())
        }
    }
}

fn summary(doc: &Value) -> Option<&Map<String, Value>> {
    doc.get("market_sentiment_summary")
        .and_then(Value::as_object)
}

fn tokens(doc: &Value) -> &[Value] {
    summary(doc)
        .and_then(|s| s.get("detailed_thought_token_analysis"))
        .or_else(|| doc.get("detailed_thought_token_analysis"))
        .and_then(Value::as_array)
        .map(Vec::as_slice)
        .unwrap_or(&[])
}

fn emotion_list(v: Option<&Value>) -> Vec<(&str, &Value)> {
    v.and_then(Value::as_array)
        .map(|items| {
            items
                .iter()
                .filter_map(|item| Some((item.get("emotion")?.as_str()?, item.get("score")?)))
                .collect()
        })
        .unwrap_or_default()
}

fn score_map(v: Option<&Value>) -> Vec<(&str, &Value)> {
    v.and_then(Value::as_object)
        .map(|m| m.iter().map(|(k, v)| (k.as_str(), v)).collect())
        .unwrap_or_default()
}

/// Every dimension name a document scores, in order of appearance.
fn collect_dimensions(doc: &Value, out: &mut Vec<String>) {
    let mut push = |name: &str| {
        if !out.iter().any(|l| l == name) {
            out.push(name.to_string());
        }
    };
    if let Some(s) = summary(doc) {
        for (name, _) in emotion_list(s.get("dominant_emotions")) {
            push(name);
        }
        for (name, _) in score_map(s.get("cognitive_profile")) {
            push(name);
        }
        if let Some(seg) = s.get("segregated_sentiment").and_then(Value::as_object) {
            for block in seg.values() {
                for (name, _) in emotion_list(block.get("dominant_emotions")) {
                    push(name);
                }
                for (name, _) in score_map(block.get("cognitive_profile")) {
                    push(name);
                }
            }
        }
        if let Some(items) = s.get("narrative_dynamics").and_then(Value::as_array) {
            for item in items {
                for (name, _) in score_map(item.get("sentiment_profile")) {
                    push(name);
                }
            }
        }
    }
    for t in tokens(doc) {
        for (name, _) in score_map(t.get("sentiment_vector")) {
            push(name);
        }
    }
}

fn number(v: &Value, ctx: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::parse(ctx.to_string(), format!("expected a number, got {v}")))
}

fn admit(registry: &Registry, policy: ScorePolicy, dim: &str, v: &Value) -> Result<(String, f64)> {
    if !registry.contains(dim) {
        return Err(Error::UnknownDimension(dim.to_string()));
    }
    let x = number(v, dim)?;
    Ok((dim.to_string(), policy.admit(dim, x)?))
}

fn persona_block(
    registry: &Registry,
    policy: ScorePolicy,
    block: &Value,
) -> Result<CognitiveVector> {
    let mut pairs = Vec::new();
    for (dim, v) in emotion_list(block.get("dominant_emotions")) {
        pairs.push(admit(registry, policy, dim, v)?);
    }
    for (dim, v) in score_map(block.get("cognitive_profile")) {
        pairs.push(admit(registry, policy, dim, v)?);
    }
    CognitiveVector::from_pairs(registry, pairs, policy)
}

fn date_of(doc: &Value, fallback: Option<NaiveDate>) -> Result<NaiveDate> {
    let raw = doc
        .get("date")
        .or_else(|| doc.get("report_metadata").and_then(|m| m.get("date")));
    match raw {
        Some(v) => {
            let s = v
                .as_str()
                .ok_or_else(|| Error::parse("date", format!("expected a string, got {v}")))?;
            NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
                .map_err(|_| Error::parse("date", format!("not an ISO date: {s:?}")))
        }
        None => fallback.ok_or_else(|| Error::MissingField("date".into())),
    }
}

fn report_from_value(
    doc: &Value,
    registry: &Registry,
    opts: &ParseOptions,
) -> Result<DailySentimentReport> {
    let policy = opts.policy;
    let date = date_of(doc, opts.fallback_date)?;
    let meta = doc.get("report_metadata");
    let model_version = meta
        .and_then(|m| m.get("model_version").or_else(|| m.get("report_id")))
        .and_then(Value::as_str)
        .map(str::to_string);

    let summary =
        summary(doc).ok_or_else(|| Error::MissingField("market_sentiment_summary".into()))?;
    let overall = summary
        .get("overall_sentiment_index")
        .ok_or_else(|| Error::MissingField("overall_sentiment_index".into()))?;
    let overall_sentiment_index = policy.admit(
        "overall_sentiment_index",
        number(overall, "overall_sentiment_index")?,
    )?;

    let mut dominant_emotions = Vec::new();
    for (dim, v) in emotion_list(summary.get("dominant_emotions")) {
        dominant_emotions.push(admit(registry, policy, dim, v)?);
    }
    for (dim, v) in score_map(summary.get("cognitive_profile")) {
        admit(registry, policy, dim, v)?;
    }

    let mut narrative_topics = Vec::new();
    if let Some(items) = summary.get("narrative_dynamics").and_then(Value::as_array) {
        for item in items {
            for (dim, v) in score_map(item.get("sentiment_profile")) {
                admit(registry, policy, dim, v)?;
            }
            if let Some(topic) = item.get("topic").and_then(Value::as_str) {
                narrative_topics.push(topic.to_string());
            }
        }
    }

    let mut diagnosed_biases = Vec::new();
    if let Some(items) = summary.get("diagnosed_biases").and_then(Value::as_array) {
        for item in items {
            let tag = item
                .get("bias_enum")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::MissingField("bias_enum".into()))?;
            diagnosed_biases.push(tag.parse::<Bias>()?);
        }
    }

    // Thought tokens: persona-tagged ones feed the persona means, all of
    // them count toward the metacognition share.
    let mut comments = Vec::new();
    let mut tagged = 0usize;
    let all_tokens = tokens(doc);
    for t in all_tokens {
        let mut pairs = Vec::new();
        for (dim, v) in score_map(t.get("sentiment_vector")) {
            pairs.push(admit(registry, policy, dim, v)?);
        }
        let metacognitive = t
            .get("tags")
            .and_then(Value::as_array)
            .is_some_and(|tags| tags.iter().any(|x| x.as_str() == Some(TAG_METACOGNITION)));
        tagged += usize::from(metacognitive);
        if let Some(p) = t.get("persona_enum").and_then(Value::as_str) {
            let Ok(persona) = p.parse::<Persona>() else {
                continue;
            };
            comments.push(CommentVector {
                persona,
                vector: CognitiveVector::from_pairs(registry, pairs, policy)?,
                metacognitive,
            });
        }
    }
    let from_tokens = aggregate_daily(registry, date, &comments)?;

    let segregated = summary
        .get("segregated_sentiment")
        .and_then(Value::as_object);
    let pick = |persona: Persona| -> Result<(CognitiveVector, bool)> {
        if let Some(block) = segregated.and_then(|s| s.get(persona.as_str())) {
            return Ok((persona_block(registry, policy, block)?, false));
        }
        let missing = match persona {
            Persona::Novice => from_tokens.novice_missing,
            Persona::Veteran => from_tokens.veteran_missing,
        };
        Ok((from_tokens.persona(persona).clone(), missing))
    };
    let (novice, novice_missing) = pick(Persona::Novice)?;
    let (veteran, veteran_missing) = pick(Persona::Veteran)?;

    let metacognition_score = match summary.get("metacognition_score") {
        Some(v) => number(v, "metacognition_score")?,
        None if all_tokens.is_empty() => 0.0,
        None => tagged as f64 / all_tokens.len() as f64,
    };

    let mut persona_day = PersonaDayState::new(date, novice, veteran, metacognition_score)?;
    persona_day.novice_missing = novice_missing;
    persona_day.veteran_missing = veteran_missing;

    Ok(DailySentimentReport {
        date,
        model_version,
        overall_sentiment_index,
        dominant_emotions,
        persona_day,
        diagnosed_biases,
        narrative_topics,
    })
}

/// Canonical document for a report. Parsing it back yields the same report.
pub fn to_document(report: &DailySentimentReport) -> Value {
    let persona = |v: &CognitiveVector| -> Value {
        let profile: Map<String, Value> =
            v.iter().map(|(k, s)| (k.to_string(), json!(s))).collect();
        json!({ "cognitive_profile": profile })
    };
    let day = &report.persona_day;
    let mut segregated = Map::new();
    if !day.novice_missing {
        segregated.insert("novice".into(), persona(&day.novice));
    }
    if !day.veteran_missing {
        segregated.insert("veteran".into(), persona(&day.veteran));
    }
    let mut summary = Map::new();
    summary.insert(
        "overall_sentiment_index".into(),
        json!(report.overall_sentiment_index),
    );
    summary.insert(
        "dominant_emotions".into(),
        Value::Array(
            report
                .dominant_emotions
                .iter()
                .map(|(e, s)| json!({ "emotion": e, "score": s }))
                .collect(),
        ),
    );
    summary.insert("segregated_sentiment".into(), Value::Object(segregated));
    summary.insert("metacognition_score".into(), json!(day.metacognition_score));
    summary.insert(
        "diagnosed_biases".into(),
        Value::Array(
            report
                .diagnosed_biases
                .iter()
                .map(|b| json!({ "bias_enum": b.as_enum_str() }))
                .collect(),
        ),
    );
    summary.insert(
        "narrative_dynamics".into(),
        Value::Array(
            report
                .narrative_topics
                .iter()
                .map(|t| json!({ "topic": t }))
                .collect(),
        ),
    );
    let mut doc = Map::new();
    doc.insert("date".into(), json!(report.date.to_string()));
    if let Some(v) = &report.model_version {
        doc.insert("report_metadata".into(), json!({ "model_version": v }));
    }
    doc.insert("market_sentiment_summary".into(), Value::Object(summary));
    Value::Object(doc)
}
