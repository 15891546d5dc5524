//! Verification metrics and inter-modality correlation.
//!
//! The ROC is built by exact counting at every distinct fused score (decision
//! rule: score ≥ threshold ⇒ match) plus a sentinel above the maximum, with
//! no binning or interpolation, so the operating point at a target FMR is a
//! threshold the system could actually run at. Correlations are computed per
//! class over pairwise-complete observations.

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, ScoreDataset};
use crate::error::{Error, Result};

/// One exact operating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fmr: f64,
    pub tmr: f64,
}

/// Operating points ordered by strictly increasing threshold; FMR and TMR
/// are non-increasing along the curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub n_genuine: usize,
    pub n_imposter: usize,
}

impl RocCurve {
    /// TMR at the smallest threshold whose FMR does not exceed the target.
    /// The sentinel point guarantees a qualifying threshold exists.
    pub fn tmr_at_fmr(&self, target_fmr: f64) -> f64 {
        self.operating_point_at_fmr(target_fmr)
            .map_or(0.0, |p| p.tmr)
    }

    pub fn operating_point_at_fmr(&self, target_fmr: f64) -> Option<&RocPoint> {
        self.points.iter().find(|p| p.fmr <= target_fmr)
    }
}

/// Exact ROC over fused (score, label) pairs. Errors unless both classes are
/// represented.
pub fn roc(scored: &[(f64, Label)]) -> Result<RocCurve> {
    let n_genuine = scored.iter().filter(|(_, l)| *l == Label::Genuine).count();
    let n_imposter = scored.len() - n_genuine;
    if n_genuine == 0 || n_imposter == 0 {
        return Err(Error::Metric(format!(
            "ROC needs both classes (genuine {n_genuine}, imposter {n_imposter})"
        )));
    }
    if let Some((s, _)) = scored.iter().find(|(s, _)| !s.is_finite()) {
        return Err(Error::Metric(format!("non-finite fused score {s}")));
    }

    let mut sorted: Vec<(f64, Label)> = scored.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Walking thresholds upward, everything at or after the current position
    // still matches.
    let mut points = Vec::new();
    let mut genuine_below = 0usize;
    let mut imposter_below = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        points.push(RocPoint {
            threshold,
            fmr: (n_imposter - imposter_below) as f64 / n_imposter as f64,
            tmr: (n_genuine - genuine_below) as f64 / n_genuine as f64,
        });
        while i < sorted.len() && sorted[i].0 == threshold {
            match sorted[i].1 {
                Label::Genuine => genuine_below += 1,
                Label::Imposter => imposter_below += 1,
            }
            i += 1;
        }
    }
    // Sentinel above the maximum score: nothing matches.
    points.push(RocPoint {
        threshold: sorted.last().unwrap().0.next_up(),
        fmr: 0.0,
        tmr: 0.0,
    });

    Ok(RocCurve {
        points,
        n_genuine,
        n_imposter,
    })
}

/// Pearson correlation; `None` when either side is constant or has fewer
/// than two values.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    if constant(xs) || constant(ys) {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mid-ranks (ties get the average of the positions they occupy).
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over mid-ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    pearson(&midranks(xs), &midranks(ys))
}

/// A symmetric correlation matrix with unit diagonal; `None` entries are
/// undefined pairs (too few joint observations or zero variance).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrMatrix {
    pub m: usize,
    /// Row-major, length `m * m`.
    pub entries: Vec<Option<f64>>,
}

impl CorrMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i * self.m + j]
    }

    /// Upper-triangle pairs with no defined correlation.
    pub fn undefined_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                if self.get(i, j).is_none() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Mean over defined upper-triangle entries, signed or absolute.
    pub fn mean_upper(&self, absolute: bool) -> Option<f64> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                if let Some(r) = self.get(i, j) {
                    sum += if absolute { r.abs() } else { r };
                    count += 1;
                }
            }
        }
        (count > 0).then(|| sum / count as f64)
    }
}

fn corr_matrix_with(
    dataset: &ScoreDataset,
    class: Label,
    f: impl Fn(&[f64], &[f64]) -> Option<f64>,
) -> Result<CorrMatrix> {
    let class_rows: Vec<_> = dataset
        .rows()
        .iter()
        .filter(|r| r.label == class)
        .collect();
    if class_rows.len() < 2 {
        return Err(Error::Metric(format!(
            "need ≥ 2 rows labeled {class}, got {}",
            class_rows.len()
        )));
    }
    let m = dataset.n_modalities();
    let mut entries = vec![None; m * m];
    for i in 0..m {
        entries[i * m + i] = Some(1.0);
        for j in (i + 1)..m {
            // Pairwise-complete observations only.
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for row in &class_rows {
                if let (Some(a), Some(b)) = (row.scores[i], row.scores[j]) {
                    xs.push(a);
                    ys.push(b);
                }
            }
            let r = f(&xs, &ys);
            entries[i * m + j] = r;
            entries[j * m + i] = r;
        }
    }
    Ok(CorrMatrix { m, entries })
}

/// Pairwise Pearson matrix over rows of one class.
pub fn pearson_matrix(dataset: &ScoreDataset, class: Label) -> Result<CorrMatrix> {
    corr_matrix_with(dataset, class, pearson)
}

/// Pairwise Spearman matrix over rows of one class.
pub fn spearman_matrix(dataset: &ScoreDataset, class: Label) -> Result<CorrMatrix> {
    corr_matrix_with(dataset, class, spearman)
}

/// Correlation report for one class. The headline mean is the signed mean of
/// the upper triangle; the absolute-value mean is carried alongside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCorr {
    pub pearson: CorrMatrix,
    pub spearman: CorrMatrix,
    pub mean_pearson: Option<f64>,
    pub mean_pearson_abs: Option<f64>,
    pub mean_spearman: Option<f64>,
    pub mean_spearman_abs: Option<f64>,
    /// Upper-triangle pairs with undefined Pearson correlation.
    pub undefined_pairs: Vec<(usize, usize)>,
}

pub fn class_corr(dataset: &ScoreDataset, class: Label) -> Result<ClassCorr> {
    let pearson = pearson_matrix(dataset, class)?;
    let spearman = spearman_matrix(dataset, class)?;
    Ok(ClassCorr {
        mean_pearson: pearson.mean_upper(false),
        mean_pearson_abs: pearson.mean_upper(true),
        mean_spearman: spearman.mean_upper(false),
        mean_spearman_abs: spearman.mean_upper(true),
        undefined_pairs: pearson.undefined_pairs(),
        pearson,
        spearman,
    })
}

/// Per-class correlation summaries; a class is `None` (with the error
/// recorded) when it has too few rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrSummary {
    pub genuine: Option<ClassCorr>,
    pub genuine_error: Option<String>,
    pub imposter: Option<ClassCorr>,
    pub imposter_error: Option<String>,
}

pub fn corr_summary(dataset: &ScoreDataset) -> CorrSummary {
    let split = |r: Result<ClassCorr>| match r {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (genuine, genuine_error) = split(class_corr(dataset, Label::Genuine));
    let (imposter, imposter_error) = split(class_corr(dataset, Label::Imposter));
    CorrSummary {
        genuine,
        genuine_error,
        imposter,
        imposter_error,
    }
}
