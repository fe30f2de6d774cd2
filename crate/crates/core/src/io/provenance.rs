use super::RunConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "bykov";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identifies how an output was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config: &RunConfig) -> Self {
        Self { tool: TOOL.into(), version: VERSION.into(), config_sha256: config_hash(config), seed: config.seed }
    }

    /// `#`-prefixed header lines for text outputs.
    pub fn comment_lines(&self, config: &RunConfig) -> String {
        let json = serde_json::to_string(&config.canonical()).expect("config serialises");
        format!(
            "# tool: {} {}\n# config_sha256: {}\n# seed: {}\n# config: {}\n",
            self.tool, self.version, self.config_sha256, self.seed, json
        )
    }
}

/// SHA-256 of the canonical JSON form of the config, excluding thread count
/// and output directory.
pub fn config_hash(config: &RunConfig) -> String {
    let json = serde_json::to_string(&config.canonical()).expect("config serialises");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
