//! Reproducible verification campaigns: random ensembles, per-trial inputs,
//! aggregation, adversarial slack search and report emission.

pub mod campaign;
pub mod config;
pub mod ensembles;
pub mod explore;
pub mod instance;
pub mod report;

use std::path::PathBuf;

use thiserror::Error;

use crate::theorems::TheoremId;

pub use campaign::{case, run_campaign, Aggregate, Anomaly, Report};
pub use config::{parse_dims, CampaignConfig, ConfigError, OutputFormat, ParamGrid};
pub use ensembles::{sample_operator, OperatorKind};
pub use explore::explore;
pub use instance::{derive_seed, draw_instance, Instance, MAX_REDRAWS};
pub use report::{emit_report, render_csv, render_json};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("{0} produced no matching certificate")]
    NoCertificate(TheoremId),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}
