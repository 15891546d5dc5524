//! Multibiometric score-level fusion under missing scores.
//!
//! This crate studies what to do when a multimodal score vector arrives with
//! holes in it: simulate missingness at controlled rates, fill the holes with
//! univariate (mean/median) or chained-equation (MICE) imputers backed by
//! Bayesian-ridge, regression-tree, or k-NN regressors, fuse with the simple
//! sum rule over min-max-normalized scores, and measure verification
//! performance (TMR at a fixed FMR) and inter-modality correlation per class.
//!
//! The pieces compose into a seeded, reproducible experiment grid over
//! {missing proportion × target class × imputer × balancing} with repeated
//! corruption trials; see [`experiment::run`].
//!
//! ```
//! use scorefuse::prelude::*;
//!
//! let config = ExperimentConfig {
//!     input: Some(InputSource::Synth {
//!         config: SynthConfig::equicorrelated(3, 40, 400, 0.7, 0.3, 0.6, 0.1, 0.1, 7),
//!     }),
//!     proportions: vec![0, 50],
//!     variants: vec![TargetClass::Any],
//!     imputers: vec![ImputerSetting::None, ImputerSetting::MiceBayes],
//!     balance: BalanceMode::Off,
//!     trials: 2,
//!     ..ExperimentConfig::default()
//! };
//! let report = scorefuse::experiment::run(&config).unwrap();
//! assert_eq!(report.cells.len(), 2 * 1 * 2);
//! ```

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod fusion;
pub mod impute;
pub mod io;
pub mod metrics;
pub mod report;
pub mod sim;
pub mod synth;

#[doc(hidden)]
pub mod testutil;

pub use error::{Error, Result};

/// The names most callers want in scope.
pub mod prelude {
    pub use crate::dataset::{Label, ScoreDataset, ScoreVector};
    pub use crate::experiment::{
        compare_natural_vs_simulated, run, summarize_dataset, BalanceMode, ExperimentConfig,
        ExperimentReport, ImputerSetting, InputSource, ReportFormat,
    };
    pub use crate::fusion::{fit_norm, fuse_dataset, fuse_vector, normalize, FusionMissing, NormParams};
    pub use crate::impute::{fit, ColumnStats, ImputerKind, ImputerModel, ImputerSpec, InitStat};
    pub use crate::io::{load_csv, save_csv, CsvSchema};
    pub use crate::metrics::{corr_summary, roc, CorrSummary, RocCurve};
    pub use crate::sim::{corrupt, plan_trials, CorruptionSpec, TargetClass, TrialPlan};
    pub use crate::synth::{synth_generate, SynthConfig};
}
