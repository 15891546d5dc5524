//! Grid experiment runner.
//!
//! One run sweeps {missing proportion × target class × imputer × balancing}
//! over repeated corruption trials on a fixed subject-disjoint split:
//!
//! 1. drop naturally incomplete vectors, split by probe subject;
//! 2. per arm, optionally balance the training side (the test side is shared
//!    by every arm);
//! 3. per (proportion, variant, trial), corrupt train and test independently
//!    with seeds derived from the base seed;
//! 4. per imputer, fit on the corrupted train, transform the corrupted test,
//!    min-max normalize with the (imputed) train's observed ranges, fuse,
//!    and read TMR at the target FMR — the `none` setting skips imputation
//!    and fuses under the configured missing-score convention;
//! 5. aggregate mean ± std (population) across trials per grid cell.
//!
//! Grid cells are independent jobs; with the `parallel` feature they run on
//! a rayon pool, and the report is always assembled in grid order, so the
//! output is byte-identical however many workers run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, ScoreDataset};
use crate::error::{Error, Result};
use crate::fusion::{fit_norm, fuse_dataset, normalize, FusionMissing};
use crate::impute::{fit, ImputerKind, ImputerSpec, InitStat};
use crate::io::{load_csv, CsvSchema};
use crate::metrics::{corr_summary, roc, CorrSummary};
use crate::sim::{corrupt, derive_seed, spec_seed, CorruptionSpec, TargetClass};
use crate::synth::{synth_generate, SynthConfig};

// Seed-derivation tags; every random stream in a run is
// derive_seed(base_seed, [tag, ...]) for a documented tag path.
const TAG_SPLIT: u64 = 1;
const TAG_BALANCE: u64 = 2;
const TAG_CORRUPT: u64 = 3;

const PARTITION_TRAIN: u64 = 0;
const PARTITION_TEST: u64 = 1;

/// Where the input score table comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Csv { path: PathBuf },
    Synth { config: SynthConfig },
}

/// Which balancing arms to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BalanceMode {
    On,
    Off,
    Both,
}

impl BalanceMode {
    /// Balanced-arm flags in report order (unbalanced first).
    pub fn arms(self) -> Vec<bool> {
        match self {
            BalanceMode::Off => vec![false],
            BalanceMode::On => vec![true],
            BalanceMode::Both => vec![false, true],
        }
    }
}

/// One imputer axis value: a fitted imputer kind or the no-imputation
/// baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImputerSetting {
    None,
    Mean,
    Median,
    MiceBayes,
    MiceTree,
    MiceKnn,
}

impl ImputerSetting {
    pub const ALL: [ImputerSetting; 6] = [
        ImputerSetting::None,
        ImputerSetting::Mean,
        ImputerSetting::Median,
        ImputerSetting::MiceBayes,
        ImputerSetting::MiceTree,
        ImputerSetting::MiceKnn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ImputerSetting::None => "none",
            ImputerSetting::Mean => "mean",
            ImputerSetting::Median => "median",
            ImputerSetting::MiceBayes => "mice-bayes",
            ImputerSetting::MiceTree => "mice-tree",
            ImputerSetting::MiceKnn => "mice-knn",
        }
    }

    fn kind(self) -> Option<ImputerKind> {
        match self {
            ImputerSetting::None => None,
            ImputerSetting::Mean => Some(ImputerKind::Mean),
            ImputerSetting::Median => Some(ImputerKind::Median),
            ImputerSetting::MiceBayes => Some(ImputerKind::MiceBayes),
            ImputerSetting::MiceTree => Some(ImputerKind::MiceTree),
            ImputerSetting::MiceKnn => Some(ImputerKind::MiceKnn),
        }
    }
}

impl std::fmt::Display for ImputerSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which report artifacts to write.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Both,
}

impl ReportFormat {
    pub fn wants_csv(self) -> bool {
        matches!(self, ReportFormat::Csv | ReportFormat::Both)
    }

    pub fn wants_json(self) -> bool {
        matches!(self, ReportFormat::Json | ReportFormat::Both)
    }
}

/// Full experiment configuration. The defaults are the standard settings
/// grid: 80/20 split, proportions 0–90 by 10, all three variants, all five
/// imputers plus the baseline, five trials, TMR read at FMR = 0.1%.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub input: Option<InputSource>,
    pub train_frac: f64,
    pub proportions: Vec<u8>,
    pub variants: Vec<TargetClass>,
    pub imputers: Vec<ImputerSetting>,
    pub balance: BalanceMode,
    pub trials: u32,
    pub base_seed: u64,
    pub target_fmr: f64,
    pub fusion_missing: FusionMissing,
    pub knn_k: usize,
    pub mice_max_iters: usize,
    pub mice_tol: f64,
    pub mice_init: InitStat,
    pub out_dir: Option<PathBuf>,
    pub format: ReportFormat,
    /// Worker threads for grid cells; `None` uses every core, `Some(1)`
    /// forces sequential execution.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            input: None,
            train_frac: 0.8,
            proportions: (0..=9).map(|p| p * 10).collect(),
            variants: vec![
                TargetClass::Any,
                TargetClass::GenuineOnly,
                TargetClass::ImposterOnly,
            ],
            imputers: ImputerSetting::ALL.to_vec(),
            balance: BalanceMode::Both,
            trials: 5,
            base_seed: 42,
            target_fmr: 0.001,
            fusion_missing: FusionMissing::Mean,
            knn_k: 5,
            mice_max_iters: 10,
            mice_tol: 1e-4,
            mice_init: InitStat::Mean,
            out_dir: None,
            format: ReportFormat::Both,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return Err(Error::Config(format!(
                "train_frac must be in (0, 1), got {}",
                self.train_frac
            )));
        }
        if self.proportions.is_empty() || self.variants.is_empty() || self.imputers.is_empty() {
            return Err(Error::Config(
                "proportions, variants, and imputers must be non-empty".into(),
            ));
        }
        if let Some(p) = self.proportions.iter().find(|&&p| p > 90) {
            return Err(Error::Config(format!("proportion {p} exceeds 90")));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be ≥ 1".into()));
        }
        if !(0.0..=1.0).contains(&self.target_fmr) {
            return Err(Error::Config(format!(
                "target_fmr must be in [0, 1], got {}",
                self.target_fmr
            )));
        }
        self.imputer_spec(ImputerKind::MiceBayes).validate()?;
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be ≥ 1".into()));
        }
        Ok(())
    }

    fn imputer_spec(&self, kind: ImputerKind) -> ImputerSpec {
        ImputerSpec {
            kind,
            knn_k: self.knn_k,
            mice_max_iters: self.mice_max_iters,
            mice_tol: self.mice_tol,
            mice_init: self.mice_init,
        }
    }

    /// Load or generate the input dataset.
    pub fn load_input(&self) -> Result<ScoreDataset> {
        match &self.input {
            Some(InputSource::Csv { path }) => load_csv(path, &CsvSchema::default()),
            Some(InputSource::Synth { config }) => synth_generate(config),
            None => Err(Error::Config("no input source configured".into())),
        }
    }
}

/// Row/class counts in the style of a dataset summary table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub modalities: usize,
    pub score_vectors: usize,
    pub genuine: usize,
    pub imposter: usize,
    /// Genuine share as a percentage of all vectors.
    pub genuine_pct: f64,
    pub incomplete_vectors: usize,
    /// Share of vectors with at least one missing score, as a percentage.
    pub natural_missing_pct: f64,
}

/// Count rows, classes, and natural missingness.
pub fn summarize_dataset(dataset: &ScoreDataset) -> DatasetSummary {
    let n = dataset.len();
    let genuine = dataset.count_label(Label::Genuine);
    let incomplete = dataset.incomplete_count();
    let pct = |part: usize| {
        if n == 0 {
            0.0
        } else {
            100.0 * part as f64 / n as f64
        }
    };
    DatasetSummary {
        modalities: dataset.n_modalities(),
        score_vectors: n,
        genuine,
        imposter: n - genuine,
        genuine_pct: pct(genuine),
        incomplete_vectors: incomplete,
        natural_missing_pct: pct(incomplete),
    }
}

/// One grid cell: every trial's TMR@FMR plus the across-trial aggregate.
/// `mean_tmr`/`std_tmr` are present only when every trial succeeded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub proportion: u8,
    pub variant: TargetClass,
    pub imputer: ImputerSetting,
    pub balanced: bool,
    pub trial_tmrs: Vec<Option<f64>>,
    pub mean_tmr: Option<f64>,
    /// Population standard deviation over the trials.
    pub std_tmr: Option<f64>,
    pub error: Option<String>,
}

/// Per-arm context: the training side actually used, its correlation
/// structure before any corruption, and a hash certifying the shared test
/// partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmReport {
    pub balanced: bool,
    pub error: Option<String>,
    pub train_summary: Option<DatasetSummary>,
    pub train_corr: Option<CorrSummary>,
    pub test_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub train_rows: usize,
    pub test_rows: usize,
    pub train_subjects: usize,
    pub test_subjects: usize,
}

/// Everything a grid run produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub input_summary: DatasetSummary,
    /// After dropping naturally incomplete vectors.
    pub complete_summary: DatasetSummary,
    pub split: SplitInfo,
    pub arms: Vec<ArmReport>,
    pub cells: Vec<CellResult>,
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn count_subjects(ds: &ScoreDataset) -> usize {
    let mut ids: Vec<&str> = ds.rows().iter().map(|r| r.probe_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

/// Evaluate one imputer setting on an already-corrupted train/test pair.
/// Returns TMR at the configured FMR target.
fn evaluate_cell(
    ctrain: &ScoreDataset,
    ctest: &ScoreDataset,
    setting: ImputerSetting,
    config: &ExperimentConfig,
) -> Result<f64> {
    let scored = match setting.kind() {
        None => {
            // Baseline: no imputation; normalize with the corrupted train's
            // observed ranges and fuse under the missing-score convention.
            let params = fit_norm(ctrain)?;
            let normalized = normalize(&params, ctest)?;
            fuse_dataset(&normalized, config.fusion_missing)?
        }
        Some(kind) => {
            let model = fit(ctrain, &config.imputer_spec(kind))?;
            let imputed_train = model.transform(ctrain)?;
            let imputed_test = model.transform(ctest)?;
            let params = fit_norm(&imputed_train)?;
            let normalized = normalize(&params, &imputed_test)?;
            fuse_dataset(&normalized, config.fusion_missing)?
        }
    };
    Ok(roc(&scored)?.tmr_at_fmr(config.target_fmr))
}

/// One (arm, proportion, variant, trial) job: corrupt both partitions once,
/// then score every imputer on the same corrupted data.
fn run_scenario(
    train: &ScoreDataset,
    test: &ScoreDataset,
    proportion: u8,
    variant: TargetClass,
    train_seed: u64,
    test_seed: u64,
    config: &ExperimentConfig,
) -> Vec<std::result::Result<f64, String>> {
    let corrupt_both = || -> Result<(ScoreDataset, ScoreDataset)> {
        let ctrain = corrupt(
            train,
            &CorruptionSpec {
                proportion,
                target: variant,
                seed: train_seed,
            },
        )?;
        let ctest = corrupt(
            test,
            &CorruptionSpec {
                proportion,
                target: variant,
                seed: test_seed,
            },
        )?;
        Ok((ctrain, ctest))
    };
    match corrupt_both() {
        Ok((ctrain, ctest)) => config
            .imputers
            .iter()
            .map(|&setting| {
                evaluate_cell(&ctrain, &ctest, setting, config).map_err(|e| e.to_string())
            })
            .collect(),
        Err(e) => vec![Err(e.to_string()); config.imputers.len()],
    }
}

/// Run `n` independent jobs, preserving index order in the output.
fn execute_jobs<T, F>(n: usize, workers: Option<usize>, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match workers {
            Some(1) => (0..n).map(job).collect(),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("failed to build worker pool")
                .install(|| (0..n).into_par_iter().map(job).collect()),
            None => (0..n).into_par_iter().map(job).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        (0..n).map(job).collect()
    }
}

/// Execute the full grid. Deterministic for a fixed config: every random
/// stream derives from `base_seed`, and results are assembled in grid order
/// regardless of worker scheduling.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let raw = config.load_input()?;
    let input_summary = summarize_dataset(&raw);

    // Naturally incomplete vectors are dropped before simulation.
    let complete = raw.listwise_delete();
    let complete_summary = summarize_dataset(&complete);

    let split_seed = derive_seed(config.base_seed, &[TAG_SPLIT]);
    let (train, test) = complete.split_train_test(config.train_frac, split_seed)?;
    let split = SplitInfo {
        train_rows: train.len(),
        test_rows: test.len(),
        train_subjects: count_subjects(&train),
        test_subjects: count_subjects(&test),
    };

    let arms_balanced = config.balance.arms();
    let balance_seed = derive_seed(config.base_seed, &[TAG_BALANCE]);
    let mut arm_trains: Vec<std::result::Result<ScoreDataset, String>> = Vec::new();
    let mut arm_reports = Vec::new();
    for &balanced in &arms_balanced {
        let arm_train = if balanced {
            train.balance_classes(balance_seed).map_err(|e| e.to_string())
        } else {
            Ok(train.clone())
        };
        arm_reports.push(match &arm_train {
            Ok(t) => ArmReport {
                balanced,
                error: None,
                train_summary: Some(summarize_dataset(t)),
                train_corr: Some(corr_summary(t)),
                test_hash: format!("{:016x}", test.content_hash()),
            },
            Err(e) => ArmReport {
                balanced,
                error: Some(e.clone()),
                train_summary: None,
                train_corr: None,
                test_hash: format!("{:016x}", test.content_hash()),
            },
        });
        arm_trains.push(arm_train);
    }

    // Scenario jobs: every imputer shares one corruption draw.
    struct Scenario {
        arm: usize,
        proportion: u8,
        variant: TargetClass,
        trial: u32,
    }
    let mut scenarios = Vec::new();
    for arm in 0..arms_balanced.len() {
        for &proportion in &config.proportions {
            for &variant in &config.variants {
                for trial in 0..config.trials {
                    scenarios.push(Scenario {
                        arm,
                        proportion,
                        variant,
                        trial,
                    });
                }
            }
        }
    }

    let scenario_results: Vec<Vec<std::result::Result<f64, String>>> =
        execute_jobs(scenarios.len(), config.workers, |i| {
            let s = &scenarios[i];
            match &arm_trains[s.arm] {
                Ok(arm_train) => {
                    // Train draws are arm-specific (the balanced train is a
                    // different row set); the shared test partition gets the
                    // same corruption pattern in every arm.
                    let arm_tag = u64::from(arms_balanced[s.arm]);
                    let train_base = derive_seed(
                        config.base_seed,
                        &[TAG_CORRUPT, arm_tag, PARTITION_TRAIN],
                    );
                    let test_base = derive_seed(
                        config.base_seed,
                        &[TAG_CORRUPT, PARTITION_TEST],
                    );
                    let train_seed = spec_seed(
                        train_base.wrapping_add(s.trial as u64),
                        s.variant,
                        s.proportion,
                    );
                    let test_seed = spec_seed(
                        test_base.wrapping_add(s.trial as u64),
                        s.variant,
                        s.proportion,
                    );
                    run_scenario(
                        arm_train,
                        &test,
                        s.proportion,
                        s.variant,
                        train_seed,
                        test_seed,
                        config,
                    )
                }
                Err(e) => vec![Err(e.clone()); config.imputers.len()],
            }
        });

    // Assemble cells in grid order: arm → proportion → variant → imputer.
    let scenario_index = |arm: usize, prop_i: usize, var_i: usize, trial: u32| -> usize {
        ((arm * config.proportions.len() + prop_i) * config.variants.len() + var_i)
            * config.trials as usize
            + trial as usize
    };
    let mut cells = Vec::new();
    for (arm, &balanced) in arms_balanced.iter().enumerate() {
        for (prop_i, &proportion) in config.proportions.iter().enumerate() {
            for (var_i, &variant) in config.variants.iter().enumerate() {
                for (imp_i, &imputer) in config.imputers.iter().enumerate() {
                    let mut trial_tmrs = Vec::with_capacity(config.trials as usize);
                    let mut error = None;
                    for trial in 0..config.trials {
                        match &scenario_results[scenario_index(arm, prop_i, var_i, trial)][imp_i] {
                            Ok(tmr) => trial_tmrs.push(Some(*tmr)),
                            Err(e) => {
                                trial_tmrs.push(None);
                                if error.is_none() {
                                    error = Some(format!("trial {trial}: {e}"));
                                }
                            }
                        }
                    }
                    let all: Option<Vec<f64>> = trial_tmrs.iter().copied().collect();
                    let (mean_tmr, std_tmr) = match all {
                        Some(values) => {
                            let (m, s) = mean_std(&values);
                            (Some(m), Some(s))
                        }
                        None => (None, None),
                    };
                    cells.push(CellResult {
                        proportion,
                        variant,
                        imputer,
                        balanced,
                        trial_tmrs,
                        mean_tmr,
                        std_tmr,
                        error,
                    });
                }
            }
        }
    }

    Ok(ExperimentReport {
        config: config.clone(),
        input_summary,
        complete_summary,
        split,
        arms: arm_reports,
        cells,
    })
}

/// One imputer's row in a natural-vs-simulated comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalRow {
    pub imputer: ImputerSetting,
    pub natural_tmr: Option<f64>,
    pub natural_error: Option<String>,
    pub simulated_trials: Vec<Option<f64>>,
    pub simulated_mean: Option<f64>,
    pub simulated_std: Option<f64>,
    pub simulated_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalArm {
    pub balanced: bool,
    pub natural_setup_error: Option<String>,
    pub simulated_setup_error: Option<String>,
    pub rows: Vec<NaturalRow>,
}

/// Output of [`compare_natural_vs_simulated`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalComparison {
    pub natural_missing_pct: f64,
    pub matched_proportion: u8,
    pub trials: u32,
    pub arms: Vec<NaturalArm>,
}

/// Evaluate the baseline and every configured imputer on (a) the dataset's
/// own missingness pattern and (b) simulated missingness at the natural
/// rate's grid proportion (floored to the nearest multiple of 10), the
/// latter over `trials` seeded draws.
pub fn compare_natural_vs_simulated(
    dataset: &ScoreDataset,
    config: &ExperimentConfig,
) -> Result<NaturalComparison> {
    config.validate()?;
    let incomplete = dataset.incomplete_count();
    if incomplete == 0 {
        return Err(Error::Comparison(
            "dataset has no naturally missing scores to compare against".into(),
        ));
    }
    let natural_missing_pct = 100.0 * incomplete as f64 / dataset.len() as f64;
    let matched_proportion = ((natural_missing_pct / 10.0).floor() as u8 * 10).min(90);

    let split_seed = derive_seed(config.base_seed, &[TAG_SPLIT]);
    let balance_seed = derive_seed(config.base_seed, &[TAG_BALANCE]);
    let (nat_train_all, nat_test) = dataset.split_train_test(config.train_frac, split_seed)?;
    let complete = dataset.listwise_delete();
    let (sim_train_all, sim_test) = complete.split_train_test(config.train_frac, split_seed)?;

    let mut arms = Vec::new();
    for balanced in config.balance.arms() {
        let prep = |train: &ScoreDataset| -> std::result::Result<ScoreDataset, String> {
            if balanced {
                train.balance_classes(balance_seed).map_err(|e| e.to_string())
            } else {
                Ok(train.clone())
            }
        };
        let nat_train = prep(&nat_train_all);
        let sim_train = prep(&sim_train_all);

        let arm_tag = u64::from(balanced);
        let train_base = derive_seed(config.base_seed, &[TAG_CORRUPT, arm_tag, PARTITION_TRAIN]);
        let test_base = derive_seed(config.base_seed, &[TAG_CORRUPT, PARTITION_TEST]);

        // Simulated trials share corruption draws across imputers.
        let sim_scenarios: Vec<Vec<std::result::Result<f64, String>>> = match &sim_train {
            Ok(train) => (0..config.trials)
                .map(|trial| {
                    let train_seed = spec_seed(
                        train_base.wrapping_add(trial as u64),
                        TargetClass::Any,
                        matched_proportion,
                    );
                    let test_seed = spec_seed(
                        test_base.wrapping_add(trial as u64),
                        TargetClass::Any,
                        matched_proportion,
                    );
                    run_scenario(
                        train,
                        &sim_test,
                        matched_proportion,
                        TargetClass::Any,
                        train_seed,
                        test_seed,
                        config,
                    )
                })
                .collect(),
            Err(_) => Vec::new(),
        };

        let mut rows = Vec::new();
        for (imp_i, &imputer) in config.imputers.iter().enumerate() {
            let (natural_tmr, natural_error) = match &nat_train {
                Ok(train) => match evaluate_cell(train, &nat_test, imputer, config) {
                    Ok(tmr) => (Some(tmr), None),
                    Err(e) => (None, Some(e.to_string())),
                },
                Err(e) => (None, Some(e.clone())),
            };

            let (simulated_trials, simulated_error) = match &sim_train {
                Ok(_) => {
                    let mut vals = Vec::new();
                    let mut err = None;
                    for (trial, scenario) in sim_scenarios.iter().enumerate() {
                        match &scenario[imp_i] {
                            Ok(tmr) => vals.push(Some(*tmr)),
                            Err(e) => {
                                vals.push(None);
                                if err.is_none() {
                                    err = Some(format!("trial {trial}: {e}"));
                                }
                            }
                        }
                    }
                    (vals, err)
                }
                Err(e) => (vec![None; config.trials as usize], Some(e.clone())),
            };
            let all: Option<Vec<f64>> = simulated_trials.iter().copied().collect();
            let (simulated_mean, simulated_std) = match all {
                Some(values) if !values.is_empty() => {
                    let (m, s) = mean_std(&values);
                    (Some(m), Some(s))
                }
                _ => (None, None),
            };
            rows.push(NaturalRow {
                imputer,
                natural_tmr,
                natural_error,
                simulated_trials,
                simulated_mean,
                simulated_std,
                simulated_error,
            });
        }
        arms.push(NaturalArm {
            balanced,
            natural_setup_error: nat_train.err(),
            simulated_setup_error: sim_train.err(),
            rows,
        });
    }

    Ok(NaturalComparison {
        natural_missing_pct,
        matched_proportion,
        trials: config.trials,
        arms,
    })
}
