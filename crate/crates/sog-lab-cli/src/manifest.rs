//! Run manifests: every invocation records its resolved parameters and the
//! SHA-256 digest of each output file, so a run can be replayed and verified
//! byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const ARTIFACT_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub command: String,
    /// Fully resolved parameter map (defaults, config, and flags applied).
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub started: String,
    pub finished: String,
    pub output_files: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
