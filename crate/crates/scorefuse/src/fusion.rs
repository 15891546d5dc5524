//! Min-max normalization and simple-sum fusion.
//!
//! Scores are mapped to [0, 1] with the training partition's observed
//! min/max and fused by the sum rule. Because an incomplete vector's raw sum
//! is biased low against complete vectors, the default convention divides by
//! the number of present scores (the mean of available scores); on complete
//! data that is the plain sum scaled by 1/m, which preserves ranking and
//! therefore every ROC operating point. The raw-sum convention stays
//! available behind [`FusionMissing::Sum`].

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, ScoreDataset};
use crate::error::{Error, Result};
use crate::io::FusedRow;

/// Per-modality observed min/max from the training partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    modalities: Vec<String>,
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl NormParams {
    pub fn modalities(&self) -> &[String] {
        &self.modalities
    }

    pub fn range(&self, col: usize) -> (f64, f64) {
        (self.mins[col], self.maxs[col])
    }

    /// A constant training column carries no spread to normalize by.
    pub fn is_degenerate(&self, col: usize) -> bool {
        self.maxs[col] == self.mins[col]
    }

    /// Map one score of one modality into [0, 1]; degenerate columns pin to
    /// 0.5, everything else min-max scales and clamps (test scores may fall
    /// outside the training range).
    pub fn apply(&self, col: usize, score: f64) -> f64 {
        if self.is_degenerate(col) {
            0.5
        } else {
            ((score - self.mins[col]) / (self.maxs[col] - self.mins[col])).clamp(0.0, 1.0)
        }
    }
}

/// Record per-modality observed min/max from training data only.
pub fn fit_norm(train: &ScoreDataset) -> Result<NormParams> {
    let m = train.n_modalities();
    let mut mins = vec![f64::INFINITY; m];
    let mut maxs = vec![f64::NEG_INFINITY; m];
    for row in train.rows() {
        for (j, slot) in row.scores.iter().enumerate() {
            if let Some(v) = slot {
                mins[j] = mins[j].min(*v);
                maxs[j] = maxs[j].max(*v);
            }
        }
    }
    for j in 0..m {
        if mins[j] > maxs[j] {
            return Err(Error::Fit(format!(
                "modality `{}` has no observed training scores",
                train.modalities()[j]
            )));
        }
    }
    Ok(NormParams {
        modalities: train.modalities().to_vec(),
        mins,
        maxs,
    })
}

/// Normalize every present score; missing cells pass through.
pub fn normalize(params: &NormParams, dataset: &ScoreDataset) -> Result<ScoreDataset> {
    if dataset.modalities() != params.modalities.as_slice() {
        return Err(Error::Fusion(format!(
            "modalities {:?} do not match the normalizer's {:?}",
            dataset.modalities(),
            params.modalities
        )));
    }
    let mut out = dataset.clone();
    for row in &mut out.rows {
        for (j, slot) in row.scores.iter_mut().enumerate() {
            if let Some(v) = slot {
                *v = params.apply(j, *v);
            }
        }
    }
    Ok(out)
}

/// Convention for fusing a vector that still has missing scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMissing {
    /// Mean of the present scores (default).
    Mean,
    /// Raw sum of the present scores.
    Sum,
}

impl FusionMissing {
    pub fn as_str(self) -> &'static str {
        match self {
            FusionMissing::Mean => "mean",
            FusionMissing::Sum => "sum",
        }
    }
}

/// Fuse one normalized score vector into a single score.
pub fn fuse_vector(scores: &[Option<f64>], policy: FusionMissing) -> Result<f64> {
    let present: Vec<f64> = scores.iter().flatten().copied().collect();
    if present.is_empty() {
        return Err(Error::Fusion("cannot fuse an all-missing vector".into()));
    }
    let sum: f64 = present.iter().sum();
    Ok(match policy {
        FusionMissing::Mean => sum / present.len() as f64,
        FusionMissing::Sum => sum,
    })
}

/// Fuse every row, keeping labels for downstream metrics.
pub fn fuse_dataset(dataset: &ScoreDataset, policy: FusionMissing) -> Result<Vec<(f64, Label)>> {
    dataset
        .rows()
        .iter()
        .map(|r| fuse_vector(&r.scores, policy).map(|s| (s, r.label)))
        .collect()
}

/// Fused rows with identity bookkeeping, for the fused-score CSV.
pub fn fuse_rows(dataset: &ScoreDataset, policy: FusionMissing) -> Result<Vec<FusedRow>> {
    dataset
        .rows()
        .iter()
        .map(|r| {
            fuse_vector(&r.scores, policy).map(|fused| FusedRow {
                probe_id: r.probe_id.clone(),
                gallery_id: r.gallery_id.clone(),
                label: r.label,
                fused,
            })
        })
        .collect()
}
