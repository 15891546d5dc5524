//! Dense helpers for the small (m−1)-dimensional systems the regressors
//! solve. Gauss-Jordan with partial pivoting is plenty at these sizes.

#![allow(clippy::needless_range_loop)]

/// Invert a square matrix in place semantics; returns `None` when singular.
pub(crate) fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut work: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            work[i][col]
                .abs()
                .partial_cmp(&work[j][col].abs())
                .unwrap()
        })?;
        if work[pivot][col].abs() < 1e-300 {
            return None;
        }
        work.swap(col, pivot);
        let p = work[col][col];
        for x in work[col].iter_mut() {
            *x /= p;
        }
        for row in 0..n {
            if row != col {
                let factor = work[row][col];
                if factor != 0.0 {
                    for k in 0..2 * n {
                        work[row][k] -= factor * work[col][k];
                    }
                }
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub(crate) fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_a_known_matrix() {
        let a = vec![vec![4.0, 7.0], vec![2.0, 6.0]];
        let inv = invert(&a).unwrap();
        let expected = [[0.6, -0.7], [-0.2, 0.4]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[i][j] - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_returns_none() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(invert(&a).is_none());
    }

    #[test]
    fn identity_round_trip() {
        let a = vec![
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ];
        let inv = invert(&a).unwrap();
        for i in 0..3 {
            let e = mat_vec(&a, &inv.iter().map(|r| r[i]).collect::<Vec<_>>());
            for (j, v) in e.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12);
            }
        }
    }
}
