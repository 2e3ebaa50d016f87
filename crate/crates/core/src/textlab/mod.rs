//! Text-side tooling: rhythm-driven synthetic comments, stylometric
//! fingerprints, and token-distribution perturbation.

mod fingerprint;
mod generator;
mod oscillation;
mod perturb;
mod segment;

pub use fingerprint::{
    compare_corpora, fingerprint, parse_sentiment_lexicon, text_metrics, tokenize, Fingerprint,
    Lexicons, Metric, TextMetrics, DEFAULT_BINS, LEXICON_FILES,
};
pub use generator::{
    generate_synthetic_comments, GenerationContext, GenerationRequest, MarketCondition, Physics,
    SentenceShape, SlangCategory, SlangDictionary, SlangEntry, SyntheticComment, TemplateBank,
    DEFAULT_SLANG_PROBABILITY,
};
pub use oscillation::{oscillation_schedule, OscillationParams};
pub use perturb::{perturb_distribution, semantic_gate, PerturbationForm, PerturbationParams};
pub use segment::{is_terminator, segment_sentences, sentence_lengths, Sentence, TERMINATORS};
