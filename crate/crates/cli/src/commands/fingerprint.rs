use std::path::Path;

use anyhow::{Context, Result};
use coglab_core::stats::mean;
use coglab_core::textlab::{compare_corpora, fingerprint, Fingerprint, Lexicons, Metric};
use coglab_core::Error;
use serde::Serialize;

use crate::output::csv_bytes;
use crate::{FingerprintArgs, Outcome, RunContext};

/// Non-blank lines of a corpus file.
pub fn read_corpus(path: &Path) -> Result<Vec<String>> {
    let text = crate::read_text(path)?;
    let lines: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    if lines.is_empty() {
        return Err(Error::NoInput(format!("corpus {} is empty", path.display())).into());
    }
    Ok(lines)
}

#[derive(Serialize)]
struct Row {
    metric: &'static str,
    jsd: f64,
    mean_a: f64,
    mean_b: f64,
}

fn metric_mean(fp: &Fingerprint, m: Metric) -> f64 {
    fp.sample(m).map(mean).unwrap_or(f64::NAN)
}

pub fn run(args: &FingerprintArgs, _ctx: &RunContext) -> Result<Outcome> {
    let lex = match &args.lexicons {
        Some(dir) => {
            Lexicons::load_dir(dir).with_context(|| format!("lexicons in {}", dir.display()))?
        }
        None => Lexicons::builtin(),
    };
    let a = fingerprint(&read_corpus(&args.corpus_a)?, &lex)?;
    let b = fingerprint(&read_corpus(&args.corpus_b)?, &lex)?;
    let table = compare_corpora(&a, &b, args.bins)?;
    let rows: Vec<Row> = table
        .iter()
        .map(|&(m, jsd)| Row {
            metric: m.label(),
            jsd,
            mean_a: metric_mean(&a, m),
            mean_b: metric_mean(&b, m),
        })
        .collect();

    let mut summary = format!(
        "{:<26} {:>8} {:>10} {:>10}\n",
        "metric", "jsd", "mean_a", "mean_b"
    );
    for r in &rows {
        summary.push_str(&format!(
            "{:<26} {:>8.4} {:>10.4} {:>10.4}\n",
            r.metric, r.jsd, r.mean_a, r.mean_b
        ));
    }
    let mut out = Outcome::default();
    out.artifacts.add("fingerprint.csv", csv_bytes(&rows)?);
    out.inputs = vec![args.corpus_a.clone(), args.corpus_b.clone()];
    if let Some(dir) = &args.lexicons {
        let mut files: Vec<_> = coglab_core::textlab::LEXICON_FILES
            .iter()
            .map(|f| dir.join(f))
            .collect();
        out.inputs.append(&mut files);
    }
    out.summary = summary;
    Ok(out)
}
