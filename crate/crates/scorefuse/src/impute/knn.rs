//! k-nearest-neighbor regression: unweighted mean of the targets of the `k`
//! training rows closest in Euclidean distance, ties broken by the lowest
//! row index. Queries against fewer than `k` rows fall back to all rows.

use serde::{Deserialize, Serialize};

/// A fitted k-NN regressor; "fitting" just retains the training matrix
/// (stored row-major for scan speed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub dims: usize,
    /// Row-major training matrix, `dims * len` values.
    pub train_x: Vec<f64>,
    pub train_y: Vec<f64>,
    pub k: usize,
}

impl KnnModel {
    pub fn from_rows(rows: &[Vec<f64>], train_y: Vec<f64>, k: usize) -> Self {
        let dims = rows.first().map_or(0, Vec::len);
        let mut train_x = Vec::with_capacity(dims * rows.len());
        for row in rows {
            train_x.extend_from_slice(row);
        }
        KnnModel {
            dims,
            train_x,
            train_y,
            k,
        }
    }

    pub fn len(&self) -> usize {
        self.train_y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_y.is_empty()
    }

    /// Mean target over the `k` nearest rows. The neighbor set is selected
    /// under the total order (distance, index) and summed in that order, so
    /// the result is identical to a full distance sort.
    pub fn predict(&self, query: &[f64]) -> f64 {
        assert!(!self.is_empty(), "knn predict on an empty training set");
        debug_assert_eq!(query.len(), self.dims);
        let k = self.k.clamp(1, self.len());

        // Sorted buffer of the current k best (distance, index) pairs.
        let mut best: Vec<(f64, u32)> = Vec::with_capacity(k + 1);
        for (i, row) in self.train_x.chunks_exact(self.dims).enumerate() {
            let mut d = 0.0;
            for (a, b) in row.iter().zip(query) {
                let diff = a - b;
                d += diff * diff;
            }
            let cand = (d, i as u32);
            if best.len() == k {
                let worst = *best.last().unwrap();
                if cand >= worst {
                    continue;
                }
            }
            let pos = best.partition_point(|p| *p < cand);
            best.insert(pos, cand);
            if best.len() > k {
                best.pop();
            }
        }
        best.iter().map(|&(_, i)| self.train_y[i as usize]).sum::<f64>() / k as f64
    }
}

/// Reference k-NN prediction over a row-per-vec training matrix: full sort
/// by (Euclidean distance, index), mean of the first `k` targets. Squared
/// distances order identically to Euclidean ones, so no root is taken.
pub fn knn_predict(train_x: &[Vec<f64>], train_y: &[f64], query: &[f64], k: usize) -> f64 {
    assert!(
        !train_x.is_empty() && train_x.len() == train_y.len(),
        "knn_predict needs a non-empty, aligned training set"
    );
    let mut scored: Vec<(f64, usize)> = train_x
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let d = row
                .iter()
                .zip(query)
                .map(|(a, b)| {
                    let diff = a - b;
                    diff * diff
                })
                .sum::<f64>();
            (d, i)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let k = k.clamp(1, scored.len());
    scored[..k].iter().map(|&(_, i)| train_y[i]).sum::<f64>() / k as f64
}
