use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::Utc;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub seed: Option<u64>,
    /// Relative to the output directory.
    pub artifact_paths: Vec<String>,
    pub version: String,
    pub duration: f64,
    pub created: String,
}

/// Collects artifacts of one command and writes the manifest after them.
pub struct Run {
    command: String,
    out_dir: PathBuf,
    started: Instant,
    artifacts: Vec<String>,
}

impl Run {
    pub fn start(command: &str, out_dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir)?;
        Ok(Self {
            command: command.to_string(),
            out_dir: out_dir.to_path_buf(),
            started: Instant::now(),
            artifacts: Vec::new(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        fs::write(&path, contents)?;
        self.record(&path);
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    /// Registers a file written elsewhere.
    pub fn record(&mut self, path: &Path) {
        let rel = path.strip_prefix(&self.out_dir).unwrap_or(path);
        self.artifacts.push(rel.to_string_lossy().into_owned());
    }

    pub fn finish(self, config: &BTreeMap<String, String>, seed: Option<u64>) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            command: self.command.clone(),
            config: config.clone(),
            seed,
            artifact_paths: self.artifacts,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration: self.started.elapsed().as_secs_f64(),
            created: Utc::now().to_rfc3339(),
        };
        let path = self.out_dir.join(format!("{}_manifest.json", self.command));
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}
