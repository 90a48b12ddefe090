//! Configuration, subcommand orchestration and artifact emission.
//! Every run writes CSV/JSON files plus a `manifest.json` listing each
//! output with its SHA-256.

mod artifacts;
mod commands;
mod config;

pub use artifacts::{fmt_f, sha256_file, ArtifactWriter, Manifest, ManifestEntry, MANIFEST_NAME};
pub use commands::{census_range, resolvent_lambda, run, Command};
pub use config::ExperimentConfig;

/// Machine-readable error record written on failure.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}

impl From<&crate::LabError> for ErrorRecord {
    fn from(e: &crate::LabError) -> Self {
        ErrorRecord { error: e.kind().to_string(), message: e.to_string(), exit_code: e.exit_code() }
    }
}
