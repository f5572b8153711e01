use std::fs;
use std::path::{Path, PathBuf};

use billiard_core::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

/// Written next to the primary output; carries no timestamps so identical
/// runs give identical manifests.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub precision: String,
    pub config_sha256: String,
    pub config: RunConfig,
    pub outputs: Vec<OutputEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `out/f.json` → `out/f.json.manifest.json`.
pub fn manifest_path(primary: &Path) -> PathBuf {
    let name = primary.file_name().and_then(|s| s.to_str()).unwrap_or("run");
    primary.with_file_name(format!("{name}.manifest.json"))
}

impl Manifest {
    pub fn new(subcommand: &str, precision: &str, config: &RunConfig) -> Result<Self> {
        let canonical = serde_json::to_vec(config)?;
        Ok(Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.into(),
            precision: precision.into(),
            config_sha256: sha256_hex(&canonical),
            config: config.clone(),
            outputs: Vec::new(),
        })
    }

    /// Writes `bytes` to `path` and records its hash.
    pub fn emit(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, bytes)?;
        self.outputs.push(OutputEntry {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write(&self, primary: &Path) -> Result<PathBuf> {
        let p = manifest_path(primary);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&p, text)?;
        Ok(p)
    }
}
