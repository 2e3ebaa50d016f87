//! Normalized day-state table: one row per date, both persona vectors as
//! `novice.<dim>` / `veteran.<dim>` columns, with MDI and MCFI alongside.

use std::path::Path;

use anyhow::{Context, Result};
use chrono::NaiveDate;
use coglab_core::cogvec::{CognitiveVector, DimensionRegistry, PersonaDayState};
use coglab_core::macrostate::{mcfi_of, mdi};
use coglab_core::Error;

const FIXED: [&str; 6] = [
    "date",
    "metacognition",
    "novice_missing",
    "veteran_missing",
    "mdi",
    "mcfi",
];

pub fn write_day_states(states: &[PersonaDayState], mcfi_alpha: f64) -> Result<Vec<u8>> {
    let first = states
        .first()
        .ok_or_else(|| Error::NoInput("day states".into()))?;
    let labels = first.registry().labels().to_vec();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    header.extend(labels.iter().map(|l| format!("novice.{l}")));
    header.extend(labels.iter().map(|l| format!("veteran.{l}")));
    w.write_record(&header)?;
    for s in states {
        let mut row = vec![
            s.date.to_string(),
            s.metacognition_score.to_string(),
            s.novice_missing.to_string(),
            s.veteran_missing.to_string(),
            mdi(s)?.to_string(),
            mcfi_of(s, mcfi_alpha)?.to_string(),
        ];
        row.extend(s.novice.scores().iter().map(f64::to_string));
        row.extend(s.veteran.scores().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn field<'a>(
    rec: &'a csv::StringRecord,
    idx: usize,
    line: u64,
    name: &str,
) -> Result<&'a str, Error> {
    rec.get(idx)
        .ok_or_else(|| Error::parse(format!("line {line}"), format!("missing `{name}`")))
}

fn number(text: &str, line: u64, name: &str) -> Result<f64, Error> {
    text.trim()
        .parse::<f64>()
        .map_err(|e| Error::parse(format!("line {line}, `{name}`"), e))
}

/// Reads a table written by [`write_day_states`]. MDI/MCFI columns are
/// ignored on input and recomputed by consumers.
pub fn read_day_states(text: &str) -> Result<Vec<PersonaDayState>, Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse("day-state header", e))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let date_col = col("date").ok_or_else(|| Error::MissingField("date".into()))?;
    let meta_col =
        col("metacognition").ok_or_else(|| Error::MissingField("metacognition".into()))?;
    let dims: Vec<String> = headers
        .iter()
        .filter_map(|h| h.strip_prefix("novice."))
        .map(str::to_string)
        .collect();
    if dims.is_empty() {
        return Err(Error::MissingField("novice.<dim> columns".into()));
    }
    let novice_cols: Vec<usize> = dims
        .iter()
        .map(|d| col(&format!("novice.{d}")).expect("listed"))
        .collect();
    let veteran_cols = dims
        .iter()
        .map(|d| {
            col(&format!("veteran.{d}")).ok_or_else(|| Error::MissingField(format!("veteran.{d}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let flag = |name: &str| col(name);
    let (nm_col, vm_col) = (flag("novice_missing"), flag("veteran_missing"));
    let registry = DimensionRegistry::new(dims.iter().map(String::as_str))?.shared();

    let mut out: Vec<PersonaDayState> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse("day-state row", e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let date_text = field(&rec, date_col, line, "date")?;
        let date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d")
            .map_err(|e| Error::parse(format!("line {line}, `date`"), e))?;
        let vector = |cols: &[usize]| -> Result<CognitiveVector, Error> {
            let scores = cols
                .iter()
                .zip(&dims)
                .map(|(&c, d)| number(field(&rec, c, line, d)?, line, d))
                .collect::<Result<Vec<_>, _>>()?;
            CognitiveVector::from_dense(&registry, scores)
        };
        let meta = number(
            field(&rec, meta_col, line, "metacognition")?,
            line,
            "metacognition",
        )?;
        let mut state =
            PersonaDayState::new(date, vector(&novice_cols)?, vector(&veteran_cols)?, meta)?;
        let parse_flag = |c: Option<usize>| -> Result<bool, Error> {
            match c {
                None => Ok(false),
                Some(c) => field(&rec, c, line, "missing flag")?
                    .parse::<bool>()
                    .map_err(|e| Error::parse(format!("line {line}"), e)),
            }
        };
        state.novice_missing = parse_flag(nm_col)?;
        state.veteran_missing = parse_flag(vm_col)?;
        if let Some(prev) = out.last() {
            if prev.date == date {
                return Err(Error::DuplicateDate(date));
            }
            if prev.date > date {
                return Err(Error::Unsorted(date));
            }
        }
        out.push(state);
    }
    if out.is_empty() {
        return Err(Error::NoInput("day-state table has no rows".into()));
    }
    Ok(out)
}

pub fn load_day_states(path: &Path) -> Result<Vec<PersonaDayState>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_day_states(&text).with_context(|| format!("in {}", path.display()))
}
