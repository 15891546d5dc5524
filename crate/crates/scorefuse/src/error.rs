use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by dataset handling, simulation, fitting, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("row at line {line} ({probe_id} vs {gallery_id}) has no observed scores")]
    AllMissingRow {
        line: u64,
        probe_id: String,
        gallery_id: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("balance error: {0}")]
    Balance(String),

    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("transform error: {0}")]
    Transform(String),

    #[error("fusion error: {0}")]
    Fusion(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("comparison error: {0}")]
    Comparison(String),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
