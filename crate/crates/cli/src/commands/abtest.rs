use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use coglab_core::fixtures::{IC_INDEX_PCT, IC_SENTIMENT_A, IC_SENTIMENT_B, IC_SENTIMENT_C};
use coglab_core::stats::{pearson, Correlation};
use coglab_core::Error;
use serde::Serialize;

use crate::output::csv_bytes;
use crate::{AbtestArgs, Outcome, RunContext};

/// A `key,value` series; the key column aligns series across files.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyedSeries {
    pub label: String,
    pub keys: Vec<String>,
    pub values: Vec<f64>,
}

pub fn parse_keyed_series(label: &str, text: &str) -> Result<KeyedSeries, Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut keys = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(label.to_string(), e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() < 2 {
            return Err(Error::parse(
                format!("{label} line {line}"),
                "expected key,value",
            ));
        }
        let v: f64 = rec[1]
            .parse()
            .map_err(|e| Error::parse(format!("{label} line {line}"), e))?;
        keys.push(rec[0].to_string());
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::NoInput(format!("{label} has no rows")));
    }
    Ok(KeyedSeries {
        label: label.to_string(),
        keys,
        values,
    })
}

fn load(path: &Path) -> Result<KeyedSeries> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let text = crate::read_text(path)?;
    parse_keyed_series(&label, &text).with_context(|| format!("in {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcRow {
    pub model: String,
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Pearson IC of each model against the index, in input order.
pub fn ic_table(index: &KeyedSeries, models: &[KeyedSeries]) -> Result<Vec<IcRow>, Error> {
    models
        .iter()
        .map(|m| {
            if m.values.len() != index.values.len() {
                return Err(Error::LengthMismatch {
                    left: index.values.len(),
                    right: m.values.len(),
                });
            }
            if m.keys != index.keys {
                return Err(Error::Misaligned(format!(
                    "{} keys differ from the index",
                    m.label
                )));
            }
            let Correlation { r, p, n } = pearson(&m.values, &index.values)?;
            Ok(IcRow {
                model: m.label.clone(),
                r,
                p,
                n,
            })
        })
        .collect()
}

/// True when the rows are strictly decreasing in r, i.e. the input order
/// is the realized ranking.
pub fn ordering_holds(rows: &[IcRow]) -> bool {
    rows.windows(2).all(|w| w[0].r > w[1].r)
}

pub fn bundled_series() -> (KeyedSeries, Vec<KeyedSeries>) {
    let keys: Vec<String> = (1..=IC_INDEX_PCT.len()).map(|d| d.to_string()).collect();
    let series = |label: &str, v: &[f64]| KeyedSeries {
        label: label.to_string(),
        keys: keys.clone(),
        values: v.to_vec(),
    };
    (
        series("index", &IC_INDEX_PCT),
        vec![
            series("A", &IC_SENTIMENT_A),
            series("B", &IC_SENTIMENT_B),
            series("C", &IC_SENTIMENT_C),
        ],
    )
}

pub fn run(args: &AbtestArgs, _ctx: &RunContext) -> Result<Outcome> {
    let (index, models, inputs): (KeyedSeries, Vec<KeyedSeries>, Vec<PathBuf>) = if args.bundled {
        let (i, m) = bundled_series();
        (i, m, Vec::new())
    } else {
        let index_path = args.index.clone().expect("clap requires --index");
        let mut inputs = vec![index_path.clone()];
        let models = args
            .models
            .iter()
            .map(|p| load(p))
            .collect::<Result<Vec<_>>>()?;
        inputs.extend(args.models.iter().cloned());
        (load(&index_path)?, models, inputs)
    };
    if models.is_empty() {
        return Err(Error::NoInput("no sentiment series".into()).into());
    }
    let rows = ic_table(&index, &models)?;
    let holds = ordering_holds(&rows);

    let labels: Vec<&str> = rows.iter().map(|r| r.model.as_str()).collect();
    let mut summary = format!("{:<12} {:>9} {:>11} {:>4}\n", "model", "r", "p", "n");
    for r in &rows {
        summary.push_str(&format!(
            "{:<12} {:>9.4} {:>11.3e} {:>4}\n",
            r.model, r.r, r.p, r.n
        ));
    }
    let verdict = format!(
        "ordering {}: {}\n",
        labels.join(" > "),
        if holds { "holds" } else { "violated" }
    );
    summary.push_str(&verdict);

    let mut out = Outcome::default();
    out.artifacts.add("ic.csv", csv_bytes(&rows)?);
    out.artifacts.add("verdict.txt", verdict);
    out.inputs = inputs;
    out.summary = summary;
    Ok(out)
}
