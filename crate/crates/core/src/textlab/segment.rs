use serde::Serialize;

pub const TERMINATORS: [char; 6] = ['。', '？', '！', '.', '?', '!'];

pub fn is_terminator(c: char) -> bool {
    TERMINATORS.contains(&c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sentence {
    pub text: String,
    /// Unicode scalar count, terminator excluded.
    pub len: usize,
}

/// Splits on CJK and ASCII sentence terminators. A run of terminators ends
/// one sentence; blank pieces are dropped and a trailing unterminated
/// fragment counts as a sentence.
pub fn segment_sentences(text: &str) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut push = |buf: &mut String| {
        let t = buf.trim();
        if !t.is_empty() {
            out.push(Sentence {
                text: t.to_string(),
                len: t.chars().count(),
            });
        }
        buf.clear();
    };
    for c in text.chars() {
        if is_terminator(c) {
            push(&mut current);
        } else {
            current.push(c);
        }
    }
    push(&mut current);
    out
}

pub fn sentence_lengths(text: &str) -> Vec<usize> {
    segment_sentences(text).into_iter().map(|s| s.len).collect()
}
