use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] exactcount_core::Error),

    #[error("missing required setting `{0}` (give a flag or a --config key)")]
    Missing(&'static str),

    #[error("`n_values` must be non-empty and every value at least 2")]
    BadNValues,

    #[error("`trials_per_n` must be at least 1")]
    NoTrials,

    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid config {path}: {source}")]
    ParseConfig {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status for this error: all of these are usage or I/O
    /// problems, reported as 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
