//! Run manifests: every command records its resolved options, seed, code
//! version, timestamp, and output paths next to the outputs it produced.
//! Replaying a manifest re-executes the command with the stored options and
//! reproduces each output byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Resolved option snapshot (stringly keyed, sorted for stability).
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub code_version: String,
    /// UTC ISO-8601 creation time; informational, not part of the replayed
    /// state.
    pub timestamp: String,
    /// Output files, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: BTreeMap<String, String>, seed: u64, outputs: Vec<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs,
        }
    }

    pub fn write(&self, dir: &Path, name: &str) -> std::io::Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, serde_json::to_string_pretty(self).expect("serializable manifest"))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> std::io::Result<RunManifest> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}
