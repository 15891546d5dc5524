//! Bayesian ridge regression fitted by evidence (type-II marginal
//! likelihood) maximization.
//!
//! The model is `y ~ N(Xw, 1/alpha)` with prior `w ~ N(0, 1/lambda)`. Both
//! precisions get broad Gamma hyperpriors (shape/rate `1e-6`) and are updated
//! by the usual closed-form re-estimation: with `gamma` the effective number
//! of well-determined weights, `lambda ← gamma / ‖w‖²` and
//! `alpha ← (n − gamma) / ‖y − Xw‖²`, iterated to a fixed point.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use super::linalg::{dot, invert, mat_vec};
use crate::error::{Error, Result};

const HYPER: f64 = 1e-6;
const REL_TOL: f64 = 1e-3;
const MAX_ITERS: usize = 300;

/// A fitted Bayesian ridge regressor (posterior-mean prediction).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesRidgeModel {
    /// Weights on the original predictor scale.
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Noise precision.
    pub alpha: f64,
    /// Weight-prior precision.
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BayesRidgeModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + dot(&self.weights, x)
    }
}

/// Fit on `n × p` predictors and `n` targets. Predictors are centered
/// internally; all-equal targets take the zero-variance path (zero weights,
/// intercept at the target value).
pub fn fit_bayes_ridge(x: &[Vec<f64>], y: &[f64]) -> Result<BayesRidgeModel> {
    let n = y.len();
    if x.len() != n {
        return Err(Error::Fit(format!(
            "predictor rows ({}) != targets ({n})",
            x.len()
        )));
    }
    if n < 2 {
        return Err(Error::Fit(format!("need ≥ 2 rows, got {n}")));
    }
    let p = x[0].len();
    if p == 0 || x.iter().any(|r| r.len() != p) {
        return Err(Error::Fit("ragged or empty predictor matrix".into()));
    }

    let mean_y = y.iter().sum::<f64>() / n as f64;
    let (y_min, y_max) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if y_min == y_max {
        return Ok(BayesRidgeModel {
            weights: vec![0.0; p],
            intercept: mean_y,
            alpha: 1e12,
            lambda: 1e12,
            iterations: 0,
            converged: true,
        });
    }

    let mean_x: Vec<f64> = (0..p)
        .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let xc: Vec<Vec<f64>> = x
        .iter()
        .map(|r| r.iter().zip(&mean_x).map(|(v, m)| v - m).collect())
        .collect();
    let yc: Vec<f64> = y.iter().map(|v| v - mean_y).collect();

    // Precompute X'X and X'y on centered data.
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &t) in xc.iter().zip(&yc) {
        for i in 0..p {
            xty[i] += row[i] * t;
            for j in i..p {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }

    let var_y = yc.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let mut alpha = 1.0 / var_y.max(1e-12);
    let mut lambda = 1.0;
    let mut weights = vec![0.0; p];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERS {
        iterations += 1;
        // Posterior covariance and mean for the current precisions.
        let a: Vec<Vec<f64>> = (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| alpha * xtx[i][j] + if i == j { lambda } else { 0.0 })
                    .collect()
            })
            .collect();
        let sigma = invert(&a)
            .ok_or_else(|| Error::Fit("posterior precision matrix is singular".into()))?;
        weights = mat_vec(&sigma, &xty).iter().map(|v| alpha * v).collect();

        let trace: f64 = (0..p).map(|i| sigma[i][i]).sum();
        let gamma = (p as f64 - lambda * trace).clamp(0.0, p as f64);

        let rss: f64 = xc
            .iter()
            .zip(&yc)
            .map(|(row, &t)| {
                let e = t - dot(&weights, row);
                e * e
            })
            .sum();
        let wtw = dot(&weights, &weights);

        let lambda_new = (gamma + 2.0 * HYPER) / (wtw + 2.0 * HYPER);
        let alpha_new = ((n as f64 - gamma).max(0.0) + 2.0 * HYPER) / (rss + 2.0 * HYPER);

        let rel = |new: f64, old: f64| ((new - old) / old).abs();
        if rel(alpha_new, alpha) < REL_TOL && rel(lambda_new, lambda) < REL_TOL {
            alpha = alpha_new;
            lambda = lambda_new;
            converged = true;
            break;
        }
        alpha = alpha_new;
        lambda = lambda_new;
    }

    let intercept = mean_y - dot(&weights, &mean_x);
    Ok(BayesRidgeModel {
        weights,
        intercept,
        alpha,
        lambda,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form simple-regression oracle (one predictor).
    fn ols_line(x: &[f64], y: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    }

    #[test]
    fn recovers_noise_free_line() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let ys: Vec<f64> = xs.iter().map(|v| 2.0 * v).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
        let model = fit_bayes_ridge(&rows, &ys).unwrap();

        let (slope, intercept) = ols_line(&xs, &ys);
        assert!((model.predict(&[0.3]) - (slope * 0.3 + intercept)).abs() < 1e-3);
        assert!((model.predict(&[0.3]) - 0.6).abs() < 1e-3);
        assert!(model.alpha > 0.0 && model.lambda > 0.0);
        assert!(model.converged);
    }

    #[test]
    fn constant_target_takes_zero_variance_path() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let ys = vec![0.37; 20];
        let model = fit_bayes_ridge(&rows, &ys).unwrap();
        assert_eq!(model.weights, vec![0.0]);
        assert!((model.predict(&[123.0]) - 0.37).abs() < 1e-12);
        assert!((model.predict(&[-5.0]) - 0.37).abs() < 1e-12);
    }

    #[test]
    fn noisy_slope_is_close_to_truth() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&v| {
                let noise: f64 = rng.sample(rand_distr::StandardNormal);
                v + 0.1 * noise
            })
            .collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
        let model = fit_bayes_ridge(&rows, &ys).unwrap();
        assert!((model.weights[0] - 1.0).abs() < 0.05, "slope {}", model.weights[0]);
    }

    #[test]
    fn shrinks_toward_ols_with_two_predictors() {
        // y = 1.5*x1 - 0.5*x2; check against a Cramer's-rule oracle.
        let xs: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let a = (i % 10) as f64 / 9.0;
                let b = (i / 10) as f64 / 5.0;
                vec![a, b]
            })
            .collect();
        let ys: Vec<f64> = xs.iter().map(|r| 1.5 * r[0] - 0.5 * r[1]).collect();
        let model = fit_bayes_ridge(&xs, &ys).unwrap();

        let n = ys.len() as f64;
        let m1 = xs.iter().map(|r| r[0]).sum::<f64>() / n;
        let m2 = xs.iter().map(|r| r[1]).sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let s11: f64 = xs.iter().map(|r| (r[0] - m1).powi(2)).sum();
        let s22: f64 = xs.iter().map(|r| (r[1] - m2).powi(2)).sum();
        let s12: f64 = xs.iter().map(|r| (r[0] - m1) * (r[1] - m2)).sum();
        let s1y: f64 = xs.iter().zip(&ys).map(|(r, y)| (r[0] - m1) * (y - my)).sum();
        let s2y: f64 = xs.iter().zip(&ys).map(|(r, y)| (r[1] - m2) * (y - my)).sum();
        let det = s11 * s22 - s12 * s12;
        let b1 = (s1y * s22 - s2y * s12) / det;
        let b2 = (s2y * s11 - s1y * s12) / det;

        assert!((model.weights[0] - b1).abs() < 1e-3);
        assert!((model.weights[1] - b2).abs() < 1e-3);
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(fit_bayes_ridge(&[vec![1.0]], &[1.0]).is_err());
        assert!(fit_bayes_ridge(&[vec![], vec![]], &[1.0, 2.0]).is_err());
        assert!(fit_bayes_ridge(&[vec![1.0], vec![2.0]], &[1.0]).is_err());
    }
}
