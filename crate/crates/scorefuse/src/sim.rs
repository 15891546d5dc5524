//! Seeded simulation of missing scores.
//!
//! Corruption picks `floor(proportion/100 × N)` rows of the target class
//! uniformly without replacement, then drops a uniform-random number of
//! scores in `[1, m−1]` from each picked row at positions chosen uniformly
//! without replacement. Every corrupted row keeps at least one score, and
//! rows outside the target class are cloned untouched.

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, ScoreDataset};
use crate::error::{Error, Result};

/// Which class of rows the corruption may touch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetClass {
    Any,
    GenuineOnly,
    ImposterOnly,
}

impl TargetClass {
    pub fn includes(self, label: Label) -> bool {
        match self {
            TargetClass::Any => true,
            TargetClass::GenuineOnly => label == Label::Genuine,
            TargetClass::ImposterOnly => label == Label::Imposter,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TargetClass::Any => "any",
            TargetClass::GenuineOnly => "genuine",
            TargetClass::ImposterOnly => "imposter",
        }
    }

    fn tag(self) -> u64 {
        match self {
            TargetClass::Any => 0,
            TargetClass::GenuineOnly => 1,
            TargetClass::ImposterOnly => 2,
        }
    }
}

impl std::fmt::Display for TargetClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One corruption draw: percentage of target rows to corrupt, the target
/// class, and the seed of the draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    /// Integer percent in `0..=90`.
    pub proportion: u8,
    pub target: TargetClass,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.proportion > 90 {
            return Err(Error::Config(format!(
                "proportion must be ≤ 90, got {}",
                self.proportion
            )));
        }
        Ok(())
    }
}

/// Apply one corruption draw.
///
/// Preconditions: rows of the target class must be complete (drop naturally
/// incomplete vectors first), and the target class must be non-empty whenever
/// `proportion > 0`.
pub fn corrupt(dataset: &ScoreDataset, spec: &CorruptionSpec) -> Result<ScoreDataset> {
    spec.validate()?;
    let m = dataset.n_modalities();
    let target_rows: Vec<usize> = (0..dataset.len())
        .filter(|&i| spec.target.includes(dataset.rows()[i].label))
        .collect();

    if let Some(&bad) = target_rows
        .iter()
        .find(|&&i| !dataset.rows()[i].is_complete())
    {
        let row = &dataset.rows()[bad];
        return Err(Error::Precondition(format!(
            "target-class row {bad} ({} vs {}) already has missing scores; \
             listwise-delete before simulating",
            row.probe_id, row.gallery_id
        )));
    }
    if target_rows.is_empty() && spec.proportion > 0 {
        return Err(Error::Simulation(format!(
            "no rows in target class `{}` to corrupt",
            spec.target
        )));
    }

    // floor(proportion/100 × N) in exact integer arithmetic.
    let n_corrupt = spec.proportion as usize * target_rows.len() / 100;
    let mut out = dataset.clone();
    if n_corrupt == 0 {
        return Ok(out);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut chosen: Vec<usize> = index::sample(&mut rng, target_rows.len(), n_corrupt)
        .into_iter()
        .map(|k| target_rows[k])
        .collect();
    chosen.sort_unstable();
    for &row_idx in &chosen {
        let amount = rng.random_range(1..=m - 1);
        for pos in index::sample(&mut rng, m, amount) {
            out.rows[row_idx].scores[pos] = None;
        }
    }
    Ok(out)
}

/// A repeated-trials plan over a set of corruption specs.
///
/// Trial `t` uses base seed `base_seed + t`; each spec's draw within a trial
/// is further keyed by its target class and proportion so that distinct grid
/// cells never share a stream. Callers corrupting several partitions derive a
/// distinct `base_seed` per partition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialPlan {
    pub specs: Vec<CorruptionSpec>,
    pub trials: u32,
    pub base_seed: u64,
}

impl TrialPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be ≥ 1".into()));
        }
        for spec in &self.specs {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: u32) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

/// splitmix64 finalizer; the standard 64-bit mixer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a stream seed by folding tagged components into a base seed.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut h = mix64(base);
    for &t in tags {
        h = mix64(h ^ t);
    }
    h
}

/// Seed of one corruption draw within a trial plan.
pub fn spec_seed(trial_seed: u64, target: TargetClass, proportion: u8) -> u64 {
    derive_seed(trial_seed, &[target.tag(), proportion as u64])
}

/// Run every spec for every trial, yielding the effective spec (with its
/// derived seed) next to the corrupted dataset.
pub fn plan_trials(
    dataset: &ScoreDataset,
    plan: &TrialPlan,
) -> Result<Vec<(CorruptionSpec, ScoreDataset)>> {
    plan.validate()?;
    let mut out = Vec::with_capacity(plan.specs.len() * plan.trials as usize);
    for trial in 0..plan.trials {
        let trial_seed = plan.trial_seed(trial);
        for spec in &plan.specs {
            let effective = CorruptionSpec {
                seed: spec_seed(trial_seed, spec.target, spec.proportion),
                ..*spec
            };
            out.push((effective, corrupt(dataset, &effective)?));
        }
    }
    Ok(out)
}
