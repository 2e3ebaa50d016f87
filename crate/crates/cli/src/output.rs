//! Output files and the run manifest written next to them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Named output files, kept in memory until the run succeeds.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Artifacts {
    files: BTreeMap<String, Vec<u8>>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.insert(name.into(), bytes.into());
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(name, text);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.get(name).map(Vec::as_slice)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn extend(&mut self, prefix: &str, other: Artifacts) {
        for (name, bytes) in other.files {
            self.files.insert(format!("{prefix}{name}"), bytes);
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub inputs: Vec<FileRecord>,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<FileRecord>,
    /// SHA-256 over every output's name and digest, in name order.
    pub output_digest: String,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config_path: Option<&Path>,
        inputs: &[PathBuf],
        seed: u64,
        artifacts: &Artifacts,
    ) -> Result<Self> {
        let mut input_records = Vec::with_capacity(inputs.len());
        for path in inputs {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            input_records.push(FileRecord {
                path: path.display().to_string(),
                bytes: bytes.len(),
                sha256: sha256_hex(&bytes),
            });
        }
        let outputs: Vec<FileRecord> = artifacts
            .files
            .iter()
            .map(|(name, bytes)| FileRecord {
                path: name.clone(),
                bytes: bytes.len(),
                sha256: sha256_hex(bytes),
            })
            .collect();
        let mut hasher = Sha256::new();
        for rec in &outputs {
            hasher.update(rec.path.as_bytes());
            hasher.update([0]);
            hasher.update(rec.sha256.as_bytes());
            hasher.update(b"\n");
        }
        Ok(RunManifest {
            command: command.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            inputs: input_records,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            output_digest: hex::encode(hasher.finalize()),
        })
    }
}

/// Writes every artifact under `dir`, then the manifest.
pub fn write_outputs(dir: &Path, artifacts: &Artifacts, manifest: &RunManifest) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, bytes) in &artifacts.files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)
        .with_context(|| format!("writing manifest in {}", dir.display()))?;
    Ok(())
}

/// Serializes rows to CSV bytes.
pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}
