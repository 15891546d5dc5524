//! Multimodal match-score tables with explicit per-cell missingness.
//!
//! A [`ScoreDataset`] holds one [`ScoreVector`] per probe/gallery comparison:
//! a label (genuine or imposter) and one score slot per modality, where each
//! slot is either an observed finite score or missing. Missing cells are
//! carried as `None`, never as a sentinel value, so downstream statistics
//! cannot silently absorb them.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class of a probe/gallery comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Genuine,
    Imposter,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Genuine => "genuine",
            Label::Imposter => "imposter",
        }
    }

    /// Case-insensitive parse of `genuine` / `imposter`.
    pub fn parse(s: &str) -> Option<Label> {
        match s.trim().to_ascii_lowercase().as_str() {
            "genuine" => Some(Label::Genuine),
            "imposter" => Some(Label::Imposter),
            _ => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of a score table: the match scores between a probe identity and a
/// gallery identity across all modalities. A `None` slot is a missing score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub probe_id: String,
    pub gallery_id: String,
    pub label: Label,
    pub scores: Vec<Option<f64>>,
}

impl ScoreVector {
    pub fn is_complete(&self) -> bool {
        self.scores.iter().all(Option::is_some)
    }

    pub fn missing_count(&self) -> usize {
        self.scores.iter().filter(|s| s.is_none()).count()
    }

    pub fn present_count(&self) -> usize {
        self.scores.len() - self.missing_count()
    }
}

/// An immutable table of score vectors over a fixed set of modalities.
///
/// Invariants enforced on construction: at least two uniquely named
/// modalities, every row has exactly one slot per modality, every observed
/// score is finite, and no row is entirely missing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreDataset {
    pub(crate) modalities: Vec<String>,
    pub(crate) rows: Vec<ScoreVector>,
    pub(crate) provenance: String,
}

impl ScoreDataset {
    /// Validating constructor.
    pub fn from_parts(
        modalities: Vec<String>,
        rows: Vec<ScoreVector>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if modalities.len() < 2 {
            return Err(Error::Config(format!(
                "need at least 2 modalities, got {}",
                modalities.len()
            )));
        }
        for (i, name) in modalities.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Config(format!("modality {i} has an empty name")));
            }
            if modalities[..i].contains(name) {
                return Err(Error::Config(format!("duplicate modality name `{name}`")));
            }
        }
        let m = modalities.len();
        for (i, row) in rows.iter().enumerate() {
            if row.scores.len() != m {
                return Err(Error::Config(format!(
                    "row {i} has {} score slots, expected {m}",
                    row.scores.len()
                )));
            }
            if row.scores.iter().flatten().any(|s| !s.is_finite()) {
                return Err(Error::Config(format!("row {i} has a non-finite score")));
            }
            if row.present_count() == 0 {
                return Err(Error::Config(format!(
                    "row {i} ({} vs {}) has no observed scores",
                    row.probe_id, row.gallery_id
                )));
            }
        }
        Ok(ScoreDataset {
            modalities,
            rows,
            provenance: provenance.into(),
        })
    }

    pub fn modalities(&self) -> &[String] {
        &self.modalities
    }

    pub fn n_modalities(&self) -> usize {
        self.modalities.len()
    }

    pub fn rows(&self) -> &[ScoreVector] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.rows.iter().filter(|r| r.label == label).count()
    }

    /// Rows with at least one missing slot.
    pub fn incomplete_count(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_complete()).count()
    }

    /// Drop every row that contains any missing cell, preserving order.
    pub fn listwise_delete(&self) -> ScoreDataset {
        ScoreDataset {
            modalities: self.modalities.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| r.is_complete())
                .cloned()
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Subject-disjoint split on probe IDs: the distinct probe IDs are
    /// partitioned at random and a row follows its probe. `train_frac` of the
    /// IDs (floored, but keeping both sides non-empty) go to the train side.
    pub fn split_train_test(&self, train_frac: f64, seed: u64) -> Result<(ScoreDataset, ScoreDataset)> {
        if !(train_frac > 0.0 && train_frac < 1.0) {
            return Err(Error::Split(format!(
                "train_frac must be in (0, 1), got {train_frac}"
            )));
        }
        // Distinct probe IDs in first-appearance order, then a seeded shuffle.
        let mut ids: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !ids.contains(&row.probe_id.as_str()) {
                ids.push(&row.probe_id);
            }
        }
        if ids.len() < 2 {
            return Err(Error::Split(format!(
                "need at least 2 distinct probe IDs, got {}",
                ids.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ids.shuffle(&mut rng);
        let n_train = ((train_frac * ids.len() as f64).floor() as usize).clamp(1, ids.len() - 1);
        let train_ids: std::collections::HashSet<&str> = ids[..n_train].iter().copied().collect();

        let (train_rows, test_rows): (Vec<_>, Vec<_>) = self
            .rows
            .iter()
            .cloned()
            .partition(|r| train_ids.contains(r.probe_id.as_str()));
        let train = ScoreDataset {
            modalities: self.modalities.clone(),
            rows: train_rows,
            provenance: self.provenance.clone(),
        };
        let test = ScoreDataset {
            modalities: self.modalities.clone(),
            rows: test_rows,
            provenance: self.provenance.clone(),
        };
        Ok((train, test))
    }

    /// Down-sample the majority class (without replacement) to the minority
    /// class size. Minority rows are all retained; input order is preserved.
    pub fn balance_classes(&self, seed: u64) -> Result<ScoreDataset> {
        let genuine: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.rows[i].label == Label::Genuine)
            .collect();
        let imposter: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.rows[i].label == Label::Imposter)
            .collect();
        if genuine.is_empty() || imposter.is_empty() {
            return Err(Error::Balance(format!(
                "both classes must be non-empty (genuine {}, imposter {})",
                genuine.len(),
                imposter.len()
            )));
        }
        let k = genuine.len().min(imposter.len());
        let (minority, majority) = if genuine.len() <= imposter.len() {
            (genuine, imposter)
        } else {
            (imposter, genuine)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep: Vec<usize> = index::sample(&mut rng, majority.len(), k)
            .into_iter()
            .map(|j| majority[j])
            .collect();
        keep.extend(minority);
        keep.sort_unstable();
        Ok(ScoreDataset {
            modalities: self.modalities.clone(),
            rows: keep.into_iter().map(|i| self.rows[i].clone()).collect(),
            provenance: self.provenance.clone(),
        })
    }

    /// Stable 64-bit content hash (FNV-1a over a canonical encoding).
    /// Used by experiment reports to certify that two pipeline arms saw the
    /// same partition.
    pub fn content_hash(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        for name in &self.modalities {
            eat(name.as_bytes());
            eat(&[0xff]);
        }
        for row in &self.rows {
            eat(row.probe_id.as_bytes());
            eat(&[0xfe]);
            eat(row.gallery_id.as_bytes());
            eat(&[0xfd]);
            eat(&[row.label as u8]);
            for slot in &row.scores {
                match slot {
                    Some(v) => {
                        eat(&[1]);
                        eat(&v.to_bits().to_le_bytes());
                    }
                    None => eat(&[0]),
                }
            }
        }
        h
    }
}
