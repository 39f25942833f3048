//! Run manifest written next to every output file.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// `None` when the built-in reference config was used.
    pub config_path: Option<PathBuf>,
    pub config_sha256: String,
    pub preset: Option<String>,
    pub axes: Vec<String>,
    pub g2_ratio: Option<f64>,
    pub branch_policy: Option<String>,
    pub outputs: Vec<PathBuf>,
    pub format: String,
    pub tool_version: String,
    pub timestamp: String,
    /// The config after loading, with every frequency in rad/s.
    pub resolved_config: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `out.csv` → `out.csv.manifest.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
