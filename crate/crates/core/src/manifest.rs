//! Run manifests written next to every CLI output.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::io::{to_json, write_json};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every module is versioned with the crate.
pub const MODULES: [&str; 8] = [
    "field-model",
    "critical-analysis",
    "gradient-flow",
    "selector-engine",
    "radial-hamiltonians",
    "axiom-harness",
    "figure-fixtures",
    "cli-shell",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestVerdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Hex SHA-256 of each input, keyed by role.
    pub config_digests: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub module_versions: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub verdicts: Vec<ManifestVerdict>,
    /// Seconds; the only field allowed to differ between identical runs.
    pub wall_time: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            config_digests: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            module_versions: MODULES.iter().map(|m| (m.to_string(), VERSION.to_string())).collect(),
            outputs: BTreeMap::new(),
            verdicts: Vec::new(),
            wall_time: 0.0,
        }
    }

    /// Digest of the canonical JSON form of `value`.
    pub fn digest_config<T: Serialize>(&mut self, role: &str, value: &T) -> Result<()> {
        let bytes = serde_json::to_vec(value)?;
        self.config_digests.insert(role.into(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn record_output(&mut self, name: &str, contents: &[u8]) {
        self.outputs.insert(name.into(), sha256_hex(contents));
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.into(), value);
    }

    pub fn verdict(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(ManifestVerdict { name: name.into(), passed, detail: detail.into() });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// The JSON text with wall time zeroed, for determinism comparisons.
    pub fn canonical(&self) -> Result<String> {
        to_json(&Self { wall_time: 0.0, ..self.clone() })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ignores_wall_time() {
        let mut a = RunManifest::new("spectrum");
        a.tolerance("snap_tol", 1e-4);
        a.digest_config("model", &crate::fixtures::fig2_saddle()).unwrap();
        let mut b = a.clone();
        a.wall_time = 1.5;
        b.wall_time = 2.5;
        assert_eq!(a.canonical().unwrap(), b.canonical().unwrap());
        assert_ne!(to_json(&a).unwrap(), to_json(&b).unwrap());
        assert_eq!(sha256_hex(b"abc").len(), 64);
    }
}
