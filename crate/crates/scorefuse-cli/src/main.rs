//! `scorefuse` — score-level fusion experiments with missing-score
//! imputation.
//!
//! Subcommands cover the pipeline end to end: `synth` generates a score
//! table, `simulate` punches seeded holes in it, `impute` fills them from a
//! trained model, `fuse` combines modalities into one score, `evaluate`
//! reads TMR at a target FMR, and `run` / `compare-natural` drive whole
//! experiment grids. Failures print a machine-readable JSON record on stderr
//! and exit nonzero.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use scorefuse::experiment::{
    compare_natural_vs_simulated, run as run_experiment, summarize_dataset, BalanceMode,
    ExperimentConfig, ImputerSetting, InputSource, ReportFormat,
};
use scorefuse::fusion::{fit_norm, fuse_rows, normalize, FusionMissing};
use scorefuse::impute::{fit, ImputerKind, ImputerSpec, ImputerModel, InitStat};
use scorefuse::io::{load_csv, load_fused_csv, save_csv, save_fused_csv, save_roc_csv, CsvSchema};
use scorefuse::metrics::{corr_summary, roc};
use scorefuse::report::{write_natural_comparison, write_report};
use scorefuse::sim::{corrupt, CorruptionSpec, TargetClass};
use scorefuse::synth::{synth_generate, SynthConfig};

#[derive(Parser)]
#[command(
    name = "scorefuse",
    version,
    about = "Score-level fusion experiments with missing-score imputation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multimodal score table.
    Synth(SynthArgs),
    /// Print row/class/missingness counts (and optionally correlations).
    Summarize(SummarizeArgs),
    /// Simulate missing scores at a fixed proportion.
    Simulate(SimulateArgs),
    /// Fit an imputer on training data and fill a dataset.
    Impute(ImputeArgs),
    /// Min-max normalize against training ranges and fuse with the sum rule.
    Fuse(FuseArgs),
    /// Evaluate fused scores: ROC and TMR at a target FMR.
    Evaluate(EvaluateArgs),
    /// Run the full {proportion × variant × imputer × balance} grid.
    Run(RunArgs),
    /// Compare natural missingness against simulation at the matched rate.
    CompareNatural(CompareNaturalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Any,
    Genuine,
    Imposter,
}

impl From<VariantArg> for TargetClass {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Any => TargetClass::Any,
            VariantArg::Genuine => TargetClass::GenuineOnly,
            VariantArg::Imposter => TargetClass::ImposterOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ImputerArg {
    None,
    Mean,
    Median,
    MiceBayes,
    MiceTree,
    MiceKnn,
}

impl From<ImputerArg> for ImputerSetting {
    fn from(v: ImputerArg) -> Self {
        match v {
            ImputerArg::None => ImputerSetting::None,
            ImputerArg::Mean => ImputerSetting::Mean,
            ImputerArg::Median => ImputerSetting::Median,
            ImputerArg::MiceBayes => ImputerSetting::MiceBayes,
            ImputerArg::MiceTree => ImputerSetting::MiceTree,
            ImputerArg::MiceKnn => ImputerSetting::MiceKnn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FusionMissingArg {
    Mean,
    Sum,
}

impl From<FusionMissingArg> for FusionMissing {
    fn from(v: FusionMissingArg) -> Self {
        match v {
            FusionMissingArg::Mean => FusionMissing::Mean,
            FusionMissingArg::Sum => FusionMissing::Sum,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BalanceArg {
    On,
    Off,
    Both,
}

impl From<BalanceArg> for BalanceMode {
    fn from(v: BalanceArg) -> Self {
        match v {
            BalanceArg::On => BalanceMode::On,
            BalanceArg::Off => BalanceMode::Off,
            BalanceArg::Both => BalanceMode::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

impl From<FormatArg> for ReportFormat {
    fn from(v: FormatArg) -> Self {
        match v {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Both => ReportFormat::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Mean,
    Median,
}

impl From<InitArg> for InitStat {
    fn from(v: InitArg) -> Self {
        match v {
            InitArg::Mean => InitStat::Mean,
            InitArg::Median => InitStat::Median,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Full generator config as JSON (overrides the flags below).
    #[arg(long)]
    synth_config: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    modalities: usize,
    #[arg(long, default_value_t = 200)]
    n_genuine: usize,
    #[arg(long, default_value_t = 20_000)]
    n_imposter: usize,
    #[arg(long, default_value_t = 0.75)]
    genuine_mean: f64,
    #[arg(long, default_value_t = 0.25)]
    imposter_mean: f64,
    /// Off-diagonal correlation of the genuine class.
    #[arg(long, default_value_t = 0.8)]
    genuine_corr: f64,
    /// Off-diagonal correlation of the imposter class.
    #[arg(long, default_value_t = 0.2)]
    imposter_corr: f64,
    /// Per-modality standard deviation.
    #[arg(long, default_value_t = 0.12)]
    noise: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Include per-class Pearson/Spearman correlation summaries.
    #[arg(long)]
    corr: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: TextFormatArg,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Percent of target-class rows to corrupt (0–90).
    #[arg(long)]
    proportion: u8,
    #[arg(long, value_enum, default_value = "any")]
    variant: VariantArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Drop naturally incomplete rows before simulating.
    #[arg(long)]
    drop_incomplete: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ImputeArgs {
    /// Dataset to fill.
    #[arg(long)]
    input: PathBuf,
    /// Training data to fit on (or use --load-model).
    #[arg(long, conflicts_with = "load_model")]
    train: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mice-bayes")]
    imputer: ImputerArg,
    #[arg(long, default_value_t = 5)]
    knn_k: usize,
    #[arg(long, default_value_t = 10)]
    mice_max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    mice_tol: f64,
    #[arg(long, value_enum, default_value = "mean")]
    mice_init: InitArg,
    /// Reuse a fitted model saved by --save-model.
    #[arg(long)]
    load_model: Option<PathBuf>,
    #[arg(long)]
    save_model: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FuseArgs {
    /// Dataset to fuse (may still contain missing scores).
    #[arg(long)]
    input: PathBuf,
    /// Training data providing the min-max normalization ranges.
    #[arg(long)]
    train: PathBuf,
    #[arg(long, value_enum, default_value = "mean")]
    fusion_missing: FusionMissingArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Fused scores CSV (probe_id,gallery_id,label,fused).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.001)]
    target_fmr: f64,
    /// Export the full ROC as threshold,fmr,tmr.
    #[arg(long)]
    roc_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: TextFormatArg,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "synth_config")]
    input: Option<PathBuf>,
    #[arg(long)]
    synth_config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    proportions: Option<Vec<u8>>,
    #[arg(long, value_enum, value_delimiter = ',')]
    variants: Option<Vec<VariantArg>>,
    #[arg(long, value_enum, value_delimiter = ',')]
    imputers: Option<Vec<ImputerArg>>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    train_frac: Option<f64>,
    #[arg(long, value_enum)]
    balance: Option<BalanceArg>,
    #[arg(long)]
    target_fmr: Option<f64>,
    #[arg(long, value_enum)]
    fusion_missing: Option<FusionMissingArg>,
    /// Worker threads for grid cells (1 = sequential).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct CompareNaturalArgs {
    /// Dataset with naturally missing scores.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',')]
    imputers: Option<Vec<ImputerArg>>,
    #[arg(long, default_value_t = 5)]
    trials: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.8)]
    train_frac: f64,
    #[arg(long, value_enum, default_value = "both")]
    balance: BalanceArg,
    #[arg(long, default_value_t = 0.001)]
    target_fmr: f64,
    #[arg(long, value_enum, default_value = "mean")]
    fusion_missing: FusionMissingArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    format: FormatArg,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Summarize(args) => cmd_summarize(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Impute(args) => cmd_impute(args),
        Command::Fuse(args) => cmd_fuse(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Run(args) => cmd_run(args),
        Command::CompareNatural(args) => cmd_compare_natural(args),
    };
    if let Err(e) = result {
        eprintln!(
            "{}",
            serde_json::json!({ "error": format!("{e:#}") })
        );
        std::process::exit(1);
    }
}

fn load_dataset(path: &Path) -> anyhow::Result<scorefuse::dataset::ScoreDataset> {
    Ok(load_csv(path, &CsvSchema::default())?)
}

fn cmd_synth(args: SynthArgs) -> anyhow::Result<()> {
    let config = match &args.synth_config {
        Some(path) => serde_json::from_str(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => SynthConfig::equicorrelated(
            args.modalities,
            args.n_genuine,
            args.n_imposter,
            args.genuine_mean,
            args.imposter_mean,
            args.genuine_corr,
            args.imposter_corr,
            args.noise,
            args.seed,
        ),
    };
    let dataset = synth_generate(&config)?;
    save_csv(&dataset, &args.out)?;
    println!(
        "wrote {} rows × {} modalities to {}",
        dataset.len(),
        dataset.n_modalities(),
        args.out.display()
    );
    Ok(())
}

fn cmd_summarize(args: SummarizeArgs) -> anyhow::Result<()> {
    let dataset = load_dataset(&args.input)?;
    let summary = summarize_dataset(&dataset);
    let corr = args.corr.then(|| corr_summary(&dataset));

    let json = serde_json::json!({ "summary": summary, "correlation": corr });
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&json)?)?;
        println!("wrote {}", out.display());
        return Ok(());
    }
    match args.format {
        TextFormatArg::Json => println!("{}", serde_json::to_string_pretty(&json)?),
        TextFormatArg::Text => {
            println!("modalities            {}", summary.modalities);
            println!("score vectors         {}", summary.score_vectors);
            println!(
                "genuine               {} ({:.2}%)",
                summary.genuine, summary.genuine_pct
            );
            println!("imposter              {}", summary.imposter);
            println!(
                "incomplete vectors    {} ({:.2}%)",
                summary.incomplete_vectors, summary.natural_missing_pct
            );
            if let Some(corr) = corr {
                let fmt = |v: Option<f64>| v.map_or("n/a".into(), |x| format!("{x:.4}"));
                for (name, class, err) in [
                    ("genuine", &corr.genuine, &corr.genuine_error),
                    ("imposter", &corr.imposter, &corr.imposter_error),
                ] {
                    match class {
                        Some(c) => {
                            println!(
                                "{name:<9} mean pearson {} (|r| {})  mean spearman {} (|r| {})",
                                fmt(c.mean_pearson),
                                fmt(c.mean_pearson_abs),
                                fmt(c.mean_spearman),
                                fmt(c.mean_spearman_abs),
                            );
                        }
                        None => println!(
                            "{name:<9} correlation unavailable: {}",
                            err.as_deref().unwrap_or("?")
                        ),
                    }
                }
            }
        }
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let mut dataset = load_dataset(&args.input)?;
    if args.drop_incomplete {
        dataset = dataset.listwise_delete();
    }
    let spec = CorruptionSpec {
        proportion: args.proportion,
        target: args.variant.into(),
        seed: args.seed,
    };
    let corrupted = corrupt(&dataset, &spec)?;
    save_csv(&corrupted, &args.out)?;
    println!(
        "corrupted {} of {} rows ({}% of target class `{}`) -> {}",
        corrupted.incomplete_count(),
        corrupted.len(),
        args.proportion,
        spec.target,
        args.out.display()
    );
    Ok(())
}

fn cmd_impute(args: ImputeArgs) -> anyhow::Result<()> {
    let dataset = load_dataset(&args.input)?;
    let model = match (&args.load_model, &args.train) {
        (Some(path), _) => ImputerModel::from_json(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?,
        (None, Some(train_path)) => {
            let kind = match args.imputer {
                ImputerArg::None => bail!("`none` is not a fittable imputer"),
                ImputerArg::Mean => ImputerKind::Mean,
                ImputerArg::Median => ImputerKind::Median,
                ImputerArg::MiceBayes => ImputerKind::MiceBayes,
                ImputerArg::MiceTree => ImputerKind::MiceTree,
                ImputerArg::MiceKnn => ImputerKind::MiceKnn,
            };
            let spec = ImputerSpec {
                kind,
                knn_k: args.knn_k,
                mice_max_iters: args.mice_max_iters,
                mice_tol: args.mice_tol,
                mice_init: args.mice_init.into(),
            };
            let train = load_dataset(train_path)?;
            fit(&train, &spec)?
        }
        (None, None) => bail!("provide --train or --load-model"),
    };
    if let Some(path) = &args.save_model {
        std::fs::write(path, model.to_json()?)?;
        println!("saved {} model to {}", model.kind(), path.display());
    }
    let missing_before = dataset
        .rows()
        .iter()
        .map(|r| r.missing_count())
        .sum::<usize>();
    let imputed = model.transform(&dataset)?;
    save_csv(&imputed, &args.out)?;
    println!(
        "filled {missing_before} missing cells with {} -> {}",
        model.kind(),
        args.out.display()
    );
    Ok(())
}

fn cmd_fuse(args: FuseArgs) -> anyhow::Result<()> {
    let dataset = load_dataset(&args.input)?;
    let train = load_dataset(&args.train)?;
    let params = fit_norm(&train)?;
    let normalized = normalize(&params, &dataset)?;
    let fused = fuse_rows(&normalized, args.fusion_missing.into())?;
    save_fused_csv(&fused, &args.out)?;
    println!("fused {} rows -> {}", fused.len(), args.out.display());
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let rows = load_fused_csv(&args.input)?;
    let scored: Vec<(f64, scorefuse::dataset::Label)> =
        rows.iter().map(|r| (r.fused, r.label)).collect();
    let curve = roc(&scored)?;
    let point = curve
        .operating_point_at_fmr(args.target_fmr)
        .copied()
        .expect("sentinel point always qualifies");
    if let Some(path) = &args.roc_out {
        save_roc_csv(&curve, path)?;
    }
    match args.format {
        TextFormatArg::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "target_fmr": args.target_fmr,
                "tmr": point.tmr,
                "threshold": point.threshold,
                "achieved_fmr": point.fmr,
                "n_genuine": curve.n_genuine,
                "n_imposter": curve.n_imposter,
            }))?
        ),
        TextFormatArg::Text => println!(
            "TMR {:.4} at FMR ≤ {} (threshold {:.6}, achieved FMR {:.6}; {} genuine / {} imposter)",
            point.tmr,
            args.target_fmr,
            point.threshold,
            point.fmr,
            curve.n_genuine,
            curve.n_imposter
        ),
    }
    Ok(())
}

fn build_run_config(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut config: ExperimentConfig = match &args.config {
        Some(path) => serde_json::from_str(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &args.input {
        config.input = Some(InputSource::Csv { path: path.clone() });
    }
    if let Some(path) = &args.synth_config {
        let synth: SynthConfig = serde_json::from_str(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?;
        config.input = Some(InputSource::Synth { config: synth });
    }
    if let Some(p) = &args.proportions {
        config.proportions = p.clone();
    }
    if let Some(v) = &args.variants {
        config.variants = v.iter().map(|&x| x.into()).collect();
    }
    if let Some(i) = &args.imputers {
        config.imputers = i.iter().map(|&x| x.into()).collect();
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.base_seed = s;
    }
    if let Some(f) = args.train_frac {
        config.train_frac = f;
    }
    if let Some(b) = args.balance {
        config.balance = b.into();
    }
    if let Some(f) = args.target_fmr {
        config.target_fmr = f;
    }
    if let Some(f) = args.fusion_missing {
        config.fusion_missing = f.into();
    }
    if let Some(w) = args.workers {
        config.workers = Some(w);
    }
    if let Some(dir) = &args.out {
        config.out_dir = Some(dir.clone());
    }
    if let Some(f) = args.format {
        config.format = f.into();
    }
    Ok(config)
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let config = build_run_config(&args)?;
    let report = run_experiment(&config)?;

    let failed = report.cells.iter().filter(|c| c.error.is_some()).count();
    println!(
        "{} grid cells ({} failed), {} trials each",
        report.cells.len(),
        failed,
        config.trials
    );
    for arm in &report.arms {
        let name = if arm.balanced { "balanced" } else { "unbalanced" };
        match &arm.train_summary {
            Some(s) => println!(
                "{name} train: {} rows, {} genuine ({:.2}%), test hash {}",
                s.score_vectors, s.genuine, s.genuine_pct, arm.test_hash
            ),
            None => println!("{name} arm failed: {}", arm.error.as_deref().unwrap_or("?")),
        }
    }

    if let Some(dir) = &config.out_dir {
        let written = write_report(&report, dir, config.format)?;
        for path in written {
            println!("wrote {}", path.display());
        }
    } else {
        // No output directory: emit the JSON report on stdout.
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(())
}

fn cmd_compare_natural(args: CompareNaturalArgs) -> anyhow::Result<()> {
    let dataset = load_dataset(&args.input)?;
    let config = ExperimentConfig {
        imputers: args
            .imputers
            .as_ref()
            .map(|v| v.iter().map(|&x| x.into()).collect())
            .unwrap_or_else(|| ImputerSetting::ALL.to_vec()),
        trials: args.trials,
        base_seed: args.seed,
        train_frac: args.train_frac,
        balance: args.balance.into(),
        target_fmr: args.target_fmr,
        fusion_missing: args.fusion_missing.into(),
        ..ExperimentConfig::default()
    };
    let comparison = compare_natural_vs_simulated(&dataset, &config)?;

    println!(
        "natural missingness {:.2}% -> simulated at {}%",
        comparison.natural_missing_pct, comparison.matched_proportion
    );
    for arm in &comparison.arms {
        let name = if arm.balanced { "balanced" } else { "unbalanced" };
        for row in &arm.rows {
            let nat = row
                .natural_tmr
                .map_or("failed".into(), |v| format!("{v:.4}"));
            let sim = match (row.simulated_mean, row.simulated_std) {
                (Some(m), Some(s)) => format!("{m:.4} (+/- {s:.4})"),
                _ => "failed".into(),
            };
            println!("{name:<10} {:<10} natural {nat}  simulated {sim}", row.imputer);
        }
    }

    if let Some(dir) = &args.out {
        let written = write_natural_comparison(&comparison, dir, args.format.into())?;
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
