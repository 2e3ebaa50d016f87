use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use coglab_core::cogvec::{DailySentimentReport, PersonaDayState};
use coglab_core::ingest::{parse_report_stream, ParseOptions, RegistryMode};
use coglab_core::Error;
use serde::Serialize;

use super::parse_date;
use crate::daystate::write_day_states;
use crate::output::csv_bytes;
use crate::{IngestArgs, Outcome, RunContext};

fn report_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if path.is_file() && !hidden {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::NoInput(format!("no report files in {}", dir.display())).into());
    }
    Ok(files)
}

fn parse_file(path: &Path, opts: &ParseOptions) -> Result<Vec<DailySentimentReport>> {
    let text = crate::read_text(path)?;
    parse_report_stream(&text, opts).with_context(|| format!("in {}", path.display()))
}

/// A report with the file it came from.
pub type ParsedReport = (PathBuf, DailySentimentReport);

/// Parses every report file in `dir`. In extensible mode the registry is
/// widened to the union of all files before the final parse, so every
/// day shares one registry.
pub fn read_report_dir(
    dir: &Path,
    mut opts: ParseOptions,
) -> Result<(Vec<PathBuf>, Vec<ParsedReport>)> {
    let files = report_files(dir)?;
    if opts.mode == RegistryMode::Extensible {
        let mut extra: Vec<String> = Vec::new();
        for path in &files {
            for report in parse_file(path, &opts)? {
                for label in report.persona_day.registry().labels() {
                    if !opts.registry.contains(label) && !extra.contains(label) {
                        extra.push(label.clone());
                    }
                }
            }
        }
        opts.registry = opts
            .registry
            .extended_with(extra.iter().map(String::as_str))?
            .shared();
        opts.mode = RegistryMode::Strict;
    }
    let mut reports = Vec::new();
    for path in &files {
        for report in parse_file(path, &opts)? {
            reports.push((path.clone(), report));
        }
    }
    reports.sort_by_key(|(_, r)| r.date);
    if let Some(w) = reports.windows(2).find(|w| w[0].1.date == w[1].1.date) {
        return Err(Error::DuplicateDate(w[1].1.date))
            .with_context(|| format!("{} and {}", w[0].0.display(), w[1].0.display()));
    }
    Ok((files, reports))
}

#[derive(Serialize)]
struct ReportRow {
    date: chrono::NaiveDate,
    file: String,
    model_version: Option<String>,
    overall_sentiment_index: f64,
    dominant_emotion: Option<String>,
    biases: String,
    topics: String,
}

pub fn run(args: &IngestArgs, ctx: &RunContext) -> Result<Outcome> {
    let opts = ParseOptions {
        registry: ctx.config.registry()?,
        mode: if args.extensible {
            RegistryMode::Extensible
        } else {
            RegistryMode::Strict
        },
        fallback_date: args
            .fallback_date
            .as_deref()
            .map(|d| parse_date(d, "--fallback-date"))
            .transpose()?,
        ..ParseOptions::default()
    };
    let (files, reports) = read_report_dir(&args.reports_dir, opts)?;
    let states: Vec<PersonaDayState> = reports.iter().map(|(_, r)| r.persona_day.clone()).collect();
    let rows: Vec<ReportRow> = reports
        .iter()
        .map(|(path, r)| ReportRow {
            date: r.date,
            file: path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            model_version: r.model_version.clone(),
            overall_sentiment_index: r.overall_sentiment_index,
            dominant_emotion: r.dominant_emotions.first().map(|(e, _)| e.clone()),
            biases: r
                .diagnosed_biases
                .iter()
                .map(|b| b.as_enum_str())
                .collect::<Vec<_>>()
                .join(";"),
            topics: r.narrative_topics.join(";"),
        })
        .collect();

    let mut out = Outcome::default();
    out.artifacts.add(
        "day_states.csv",
        write_day_states(&states, ctx.config.mcfi_alpha)?,
    );
    out.artifacts.add("reports.csv", csv_bytes(&rows)?);
    out.summary = format!(
        "ingested {} report(s) from {} file(s): {} .. {}\n",
        reports.len(),
        files.len(),
        states
            .first()
            .map(|s| s.date.to_string())
            .unwrap_or_default(),
        states
            .last()
            .map(|s| s.date.to_string())
            .unwrap_or_default(),
    );
    out.inputs = files;
    Ok(out)
}
