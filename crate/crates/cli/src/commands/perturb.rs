use anyhow::Result;
use coglab_core::cogvec::Persona;
use coglab_core::stats::{moments, shapiro_wilk};
use coglab_core::textlab::{
    generate_synthetic_comments, perturb_distribution, sentence_lengths, GenerationContext,
    GenerationRequest, MarketCondition, PerturbationForm, PerturbationParams, Physics,
    SentenceShape, SlangDictionary, TemplateBank,
};
use serde::Serialize;

use crate::output::csv_bytes;
use crate::{ConditionArg, FormArg, Outcome, PerturbAction, PerturbArgs, RunContext};

#[derive(Serialize)]
struct CommentRow<'a> {
    index: usize,
    persona: &'static str,
    emotion: &'a str,
    has_slang: bool,
    slang_category: &'static str,
    sentences: usize,
    text: &'a str,
}

#[derive(Serialize)]
struct LengthRow {
    comment: usize,
    sentence: usize,
    length: usize,
}

#[derive(Serialize)]
struct ProbRow {
    index: usize,
    p: f64,
    q: f64,
}

pub fn run(args: &PerturbArgs, ctx: &RunContext) -> Result<Outcome> {
    let mut out = Outcome::default();
    match &args.action {
        PerturbAction::Generate {
            i_rhythm,
            p_leap,
            n,
            condition,
            event,
            novice_share,
            templates,
            slang,
            slang_p,
        } => {
            let bank = match templates {
                Some(p) => {
                    out.inputs.push(p.clone());
                    TemplateBank::parse(&crate::read_text(p)?)?
                }
                None => TemplateBank::builtin(),
            };
            let slang = match slang {
                Some(p) => {
                    out.inputs.push(p.clone());
                    SlangDictionary::parse(&crate::read_text(p)?, *slang_p)?
                }
                None => SlangDictionary {
                    probability: *slang_p,
                    ..SlangDictionary::builtin()
                },
            };
            let req = GenerationRequest {
                context: GenerationContext {
                    condition: match condition {
                        ConditionArg::Crash => MarketCondition::Crash,
                        ConditionArg::Rally => MarketCondition::Rally,
                        ConditionArg::Sideways => MarketCondition::Sideways,
                    },
                    event: event.clone(),
                },
                persona_mix: vec![
                    (Persona::Novice, *novice_share),
                    (Persona::Veteran, 1.0 - novice_share),
                ],
                physics: Physics {
                    i_rhythm: *i_rhythm,
                    p_leap: *p_leap,
                },
                shape: SentenceShape::default(),
                n: *n,
                seed: ctx.seed,
            };
            let comments = generate_synthetic_comments(&req, &slang, &bank)?;
            let mut corpus = String::new();
            let mut rows = Vec::with_capacity(comments.len());
            let mut lengths = Vec::new();
            for c in &comments {
                corpus.push_str(&c.text);
                corpus.push('\n');
                let ls = sentence_lengths(&c.text);
                for (k, &l) in ls.iter().enumerate() {
                    lengths.push(LengthRow {
                        comment: c.index,
                        sentence: k,
                        length: l,
                    });
                }
                rows.push(CommentRow {
                    index: c.index,
                    persona: c.persona.as_str(),
                    emotion: &c.emotion,
                    has_slang: c.has_slang,
                    slang_category: c.slang_category.map(|s| s.as_str()).unwrap_or(""),
                    sentences: ls.len(),
                    text: &c.text,
                });
            }
            out.artifacts.add("corpus.txt", corpus);
            out.artifacts.add("comments.csv", csv_bytes(&rows)?);
            out.artifacts.add("lengths.csv", csv_bytes(&lengths)?);

            let x: Vec<f64> = lengths.iter().map(|l| l.length as f64).collect();
            let slang_share = comments.iter().filter(|c| c.has_slang).count() as f64
                / comments.len().max(1) as f64;
            out.summary = format!(
                "{} comment(s), {} sentence(s), slang share {:.3}\n",
                comments.len(),
                x.len(),
                slang_share
            );
            if let Ok(m) = moments(&x) {
                out.summary.push_str(&format!(
                    "sentence length mean {:.3} sd {:.3} cv {} skew {}\n",
                    m.mean,
                    m.sd,
                    m.cv.map(|v| format!("{v:.4}"))
                        .unwrap_or_else(|| "n/a".into()),
                    m.skewness
                        .map(|v| format!("{v:.4}"))
                        .unwrap_or_else(|| "n/a".into()),
                ));
            }
            if let Ok(sw) = shapiro_wilk(&x) {
                out.summary
                    .push_str(&format!("shapiro-wilk W {:.4} p {:.3e}\n", sw.w, sw.p));
            }
        }
        PerturbAction::Distribution {
            probs,
            temperature,
            mask,
            form,
            damping,
            noise_sd,
        } => {
            let params = PerturbationParams {
                temperature: *temperature,
                mask: mask.clone(),
                damping: *damping,
                noise_sd: *noise_sd,
                form: match form {
                    FormArg::Tempered => PerturbationForm::Tempered,
                    FormArg::Additive => PerturbationForm::Additive,
                },
                ..PerturbationParams::default()
            };
            let q = perturb_distribution(probs, &params, ctx.seed)?;
            let rows: Vec<ProbRow> = probs
                .iter()
                .zip(&q)
                .enumerate()
                .map(|(index, (&p, &q))| ProbRow { index, p, q })
                .collect();
            out.artifacts.add("distribution.csv", csv_bytes(&rows)?);
            out.summary = format!(
                "{:?} form: [{}]\n",
                params.form,
                q.iter()
                    .map(|v| format!("{v:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
    }
    Ok(out)
}
