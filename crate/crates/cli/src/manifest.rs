//! Run manifests: which command ran, under which resolved config, with which
//! per-cell seeds, against which inputs, and a hashed inventory of every file
//! it emitted.
//!
//! Feeding a manifest back through `--config` reruns its embedded config and
//! reproduces every CSV byte for byte; manifests themselves carry timing and
//! so differ between runs. The inventory hashes are computed by reading the
//! files back from disk, so the manifest vouches for what actually landed.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub n: usize,
    pub eta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// SHA-256 of the embedded resolved config.
    pub config_sha256: String,
    /// Wall-clock duration of the run in seconds.
    pub wall_clock_s: f64,
    /// Unix timestamp at completion.
    pub finished_unix: u64,
    pub out_dir: String,
    /// Input files consumed (datasets), hashed for provenance.
    pub inputs: Vec<FileRecord>,
    /// Per-cell generator seeds, when the command generated data.
    pub seeds: Vec<SeedRecord>,
    /// Every file the run emitted, relative to out_dir.
    pub files: Vec<FileRecord>,
    /// The fully-resolved configuration; feed this manifest back through
    /// --config to reproduce the run.
    pub config: ExperimentConfig,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn hash_file(path: &Path) -> Result<(u64, String)> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Io(format!("cannot hash {}: {e}", path.display())))?;
    Ok((bytes.len() as u64, sha256_hex(&bytes)))
}

/// Accumulates the inventory while a command writes its outputs, then writes
/// `<command>.manifest.json` as the final file of the run.
pub struct ManifestBuilder {
    started: Instant,
    command: &'static str,
    out_dir: PathBuf,
    inputs: Vec<FileRecord>,
    seeds: Vec<SeedRecord>,
    files: Vec<String>,
}

impl ManifestBuilder {
    pub fn new(command: &'static str, out_dir: &Path) -> Self {
        Self {
            started: Instant::now(),
            command,
            out_dir: out_dir.to_path_buf(),
            inputs: Vec::new(),
            seeds: Vec::new(),
            files: Vec::new(),
        }
    }

    /// Hash an input file (a dataset read from anywhere on disk) right away,
    /// so the manifest records what was actually consumed.
    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        let (bytes, sha256) = hash_file(path)?;
        self.inputs.push(FileRecord {
            path: path.display().to_string(),
            bytes,
            sha256,
        });
        Ok(())
    }

    pub fn record_seed(&mut self, n: usize, eta: f64, seed: u64) {
        self.seeds.push(SeedRecord { n, eta, seed });
    }

    /// Register an emitted file by its path relative to the output directory.
    /// The file must already exist; it is hashed when the manifest closes.
    pub fn record_file(&mut self, relative: impl Into<String>) {
        self.files.push(relative.into());
    }

    /// Hash the inventory, write `<command>.manifest.json`, and return its
    /// path.
    pub fn finish(self, config: &ExperimentConfig) -> Result<PathBuf> {
        let mut files = Vec::with_capacity(self.files.len());
        for rel in &self.files {
            let (bytes, sha256) = hash_file(&self.out_dir.join(rel))?;
            files.push(FileRecord { path: rel.clone(), bytes, sha256 });
        }
        let manifest = RunManifest {
            tool: "advectfit".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            config_sha256: config.sha256(),
            wall_clock_s: self.started.elapsed().as_secs_f64(),
            finished_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            out_dir: self.out_dir.display().to_string(),
            inputs: self.inputs,
            seeds: self.seeds,
            files,
            config: config.clone(),
        };
        let path = self.out_dir.join(format!("{}.manifest.json", self.command));
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}
