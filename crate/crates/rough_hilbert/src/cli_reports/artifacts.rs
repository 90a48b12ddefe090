use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::kernel_factory::{write_kernel_csv, Coeff, DiscreteKernel};

/// Floats in CSV output: 17 significant digits.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the output root.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<ManifestEntry>,
    /// Not part of any hashed artifact.
    pub wall_time_s: f64,
}

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Writes artifacts under one root and remembers each file's hash.
pub struct ArtifactWriter {
    root: PathBuf,
    prefix: String,
    entries: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(ArtifactWriter { root: root.to_path_buf(), prefix: String::new(), entries: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Subsequent files go under `root/dir`.
    pub fn set_subdir(&mut self, dir: &str) -> Result<()> {
        self.prefix = if dir.is_empty() { String::new() } else { format!("{dir}/") };
        fs::create_dir_all(self.root.join(dir))?;
        Ok(())
    }

    fn path(&self, name: &str) -> (String, PathBuf) {
        let rel = format!("{}{name}", self.prefix);
        let abs = self.root.join(&rel);
        (rel, abs)
    }

    fn record(&mut self, rel: String, abs: &Path) -> Result<()> {
        let bytes = fs::metadata(abs)?.len();
        let sha256 = sha256_file(abs)?;
        self.entries.push(ManifestEntry { path: rel, sha256, bytes });
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let (rel, abs) = self.path(name);
        let mut w = csv::Writer::from_path(&abs)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        drop(w);
        self.record(rel, &abs)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let (rel, abs) = self.path(name);
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        fs::write(&abs, s)?;
        self.record(rel, &abs)
    }

    pub fn kernel<T: Coeff>(&mut self, name: &str, k: &DiscreteKernel<T>) -> Result<()> {
        let (rel, abs) = self.path(name);
        write_kernel_csv(k, &abs)?;
        self.record(rel, &abs)
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    /// Writes `manifest.json` at the root and returns it.
    pub fn finish(self, subcommand: &str, config: &ExperimentConfig, wall_time_s: f64) -> Result<Manifest> {
        let m = Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config: config.clone(),
            outputs: self.entries,
            wall_time_s,
        };
        fs::write(self.root.join(MANIFEST_NAME), serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(m)
    }
}
