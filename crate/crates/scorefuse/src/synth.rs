//! Synthetic multimodal score tables.
//!
//! Stand-in data for experiments when no real score set is available: each
//! class is drawn from a multivariate normal with configurable per-modality
//! means, a correlation matrix, and per-modality noise scales, then clipped
//! to [0, 1]. Subject IDs are laid out so that one probe subject owns one
//! genuine row and a block of imposter rows, which keeps both classes present
//! on each side of a subject-disjoint split.

#![allow(clippy::needless_range_loop)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, ScoreDataset, ScoreVector};
use crate::error::{Error, Result};

/// Parameters of the synthetic generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Modality count (≥ 2).
    pub modalities: usize,
    pub n_genuine: usize,
    pub n_imposter: usize,
    /// Per-modality class means, length `modalities`.
    pub genuine_means: Vec<f64>,
    pub imposter_means: Vec<f64>,
    /// Per-class correlation matrices, `modalities` × `modalities`.
    pub genuine_corr: Vec<Vec<f64>>,
    pub imposter_corr: Vec<Vec<f64>>,
    /// Per-modality standard deviations, length `modalities`.
    pub noise_scale: Vec<f64>,
    pub seed: u64,
}

impl SynthConfig {
    /// Convenience constructor: equal means per class, one off-diagonal
    /// correlation per class, one noise scale for all modalities.
    #[allow(clippy::too_many_arguments)]
    pub fn equicorrelated(
        modalities: usize,
        n_genuine: usize,
        n_imposter: usize,
        genuine_mean: f64,
        imposter_mean: f64,
        genuine_rho: f64,
        imposter_rho: f64,
        noise_scale: f64,
        seed: u64,
    ) -> Self {
        let corr = |rho: f64| -> Vec<Vec<f64>> {
            (0..modalities)
                .map(|i| {
                    (0..modalities)
                        .map(|j| if i == j { 1.0 } else { rho })
                        .collect()
                })
                .collect()
        };
        SynthConfig {
            modalities,
            n_genuine,
            n_imposter,
            genuine_means: vec![genuine_mean; modalities],
            imposter_means: vec![imposter_mean; modalities],
            genuine_corr: corr(genuine_rho),
            imposter_corr: corr(imposter_rho),
            noise_scale: vec![noise_scale; modalities],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.modalities;
        if m < 2 {
            return Err(Error::Config(format!("modalities must be ≥ 2, got {m}")));
        }
        for (name, v) in [
            ("genuine_means", &self.genuine_means),
            ("imposter_means", &self.imposter_means),
            ("noise_scale", &self.noise_scale),
        ] {
            if v.len() != m {
                return Err(Error::Config(format!(
                    "{name} has length {}, expected {m}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("{name} has a non-finite entry")));
            }
        }
        if self.noise_scale.iter().any(|&s| s < 0.0) {
            return Err(Error::Config("noise_scale entries must be ≥ 0".into()));
        }
        for (name, c) in [
            ("genuine_corr", &self.genuine_corr),
            ("imposter_corr", &self.imposter_corr),
        ] {
            validate_correlation(name, c, m)?;
        }
        Ok(())
    }
}

fn validate_correlation(name: &str, c: &[Vec<f64>], m: usize) -> Result<()> {
    if c.len() != m || c.iter().any(|row| row.len() != m) {
        return Err(Error::Config(format!("{name} must be {m}x{m}")));
    }
    for i in 0..m {
        if (c[i][i] - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("{name} diagonal must be 1")));
        }
        for j in 0..m {
            if !c[i][j].is_finite() || (c[i][j] - c[j][i]).abs() > 1e-12 {
                return Err(Error::Config(format!("{name} must be symmetric")));
            }
        }
    }
    // PSD check is the Cholesky itself.
    cholesky_psd(c).map(|_| ()).map_err(|_| {
        Error::Config(format!("{name} is not positive semidefinite"))
    })
}

/// Lower Cholesky factor, tolerating semidefinite matrices: pivots within
/// `-1e-10` of zero are clamped to zero. A zero pivot demands that the rest
/// of its column also vanish, or the matrix is not PSD.
fn cholesky_psd(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let m = a.len();
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum < -1e-10 {
                    return Err(Error::Config("matrix is not positive semidefinite".into()));
                }
                l[i][j] = sum.max(0.0).sqrt();
            } else if l[j][j] > 0.0 {
                l[i][j] = sum / l[j][j];
            } else if sum.abs() <= 1e-8 {
                l[i][j] = 0.0;
            } else {
                return Err(Error::Config("matrix is not positive semidefinite".into()));
            }
        }
    }
    Ok(l)
}

/// Generate a synthetic dataset. Deterministic for a fixed config: genuine
/// rows are drawn first, then imposter rows, from a single seeded stream.
pub fn synth_generate(config: &SynthConfig) -> Result<ScoreDataset> {
    config.validate()?;
    let m = config.modalities;
    let chol_gen = cholesky_psd(&config.genuine_corr)?;
    let chol_imp = cholesky_psd(&config.imposter_corr)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut draw = |means: &[f64], chol: &[Vec<f64>]| -> Vec<Option<f64>> {
        let z: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        (0..m)
            .map(|i| {
                let corr_z: f64 = (0..=i).map(|k| chol[i][k] * z[k]).sum();
                Some((means[i] + config.noise_scale[i] * corr_z).clamp(0.0, 1.0))
            })
            .collect()
    };

    let subject = |i: usize| format!("s{i:05}");
    let pool = config.n_genuine.max(2);
    let mut rows = Vec::with_capacity(config.n_genuine + config.n_imposter);
    for i in 0..config.n_genuine {
        rows.push(ScoreVector {
            probe_id: subject(i),
            gallery_id: subject(i),
            label: Label::Genuine,
            scores: draw(&config.genuine_means, &chol_gen),
        });
    }
    for j in 0..config.n_imposter {
        let probe = j % pool;
        let offset = 1 + (j / pool) % (pool - 1);
        rows.push(ScoreVector {
            probe_id: subject(probe),
            gallery_id: subject((probe + offset) % pool),
            label: Label::Imposter,
            scores: draw(&config.imposter_means, &chol_imp),
        });
    }

    ScoreDataset::from_parts(
        (0..m).map(|j| format!("m{}", j + 1)).collect(),
        rows,
        format!("synth(seed={})", config.seed),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label;
    use crate::metrics::pearson;

    fn base_config() -> SynthConfig {
        SynthConfig::equicorrelated(3, 50, 150, 0.7, 0.3, 0.5, 0.1, 0.1, 7)
    }

    #[test]
    fn zero_genuine_gives_all_imposters() {
        let mut cfg = base_config();
        cfg.n_genuine = 0;
        let ds = synth_generate(&cfg).unwrap();
        assert_eq!(ds.len(), 150);
        assert!(ds.rows().iter().all(|r| r.label == Label::Imposter));
        assert!(ds.rows().iter().all(|r| r.probe_id != r.gallery_id));
    }

    #[test]
    fn zero_noise_identity_corr_pins_rows_to_means() {
        let mut cfg = SynthConfig::equicorrelated(3, 20, 0, 0.7, 0.3, 0.0, 0.0, 0.0, 3);
        cfg.noise_scale = vec![0.0; 3];
        let ds = synth_generate(&cfg).unwrap();
        for row in ds.rows() {
            for slot in &row.scores {
                assert_eq!(slot.unwrap(), 0.7);
            }
        }
    }

    #[test]
    fn sample_correlation_tracks_requested_correlation() {
        // 10^4 genuine rows at off-diagonal 0.8: the sample Pearson r of any
        // modality pair must land within ±0.05 of 0.8.
        let cfg = SynthConfig::equicorrelated(3, 10_000, 0, 0.5, 0.5, 0.8, 0.0, 0.1, 99);
        let ds = synth_generate(&cfg).unwrap();
        for a in 0..3 {
            for b in (a + 1)..3 {
                let xs: Vec<f64> = ds.rows().iter().map(|r| r.scores[a].unwrap()).collect();
                let ys: Vec<f64> = ds.rows().iter().map(|r| r.scores[b].unwrap()).collect();
                let r = pearson(&xs, &ys).unwrap();
                assert!((r - 0.8).abs() < 0.05, "pair ({a},{b}): r = {r}");
            }
        }
    }

    #[test]
    fn generation_is_bit_reproducible() {
        let cfg = base_config();
        let a = synth_generate(&cfg).unwrap();
        let b = synth_generate(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scores_are_clipped_to_unit_interval() {
        let cfg = SynthConfig::equicorrelated(2, 500, 500, 0.9, 0.1, 0.0, 0.0, 0.8, 5);
        let ds = synth_generate(&cfg).unwrap();
        for row in ds.rows() {
            for slot in row.scores.iter().flatten() {
                assert!((0.0..=1.0).contains(slot));
            }
        }
    }

    #[test]
    fn non_psd_correlation_is_rejected() {
        let mut cfg = base_config();
        // Pairwise correlations (1, -1, 1) on 3 modalities are inconsistent.
        cfg.genuine_corr = vec![
            vec![1.0, 1.0, -1.0],
            vec![1.0, 1.0, 1.0],
            vec![-1.0, 1.0, 1.0],
        ];
        assert!(synth_generate(&cfg).is_err());
    }

    #[test]
    fn exact_unit_correlation_is_accepted() {
        let cfg = SynthConfig::equicorrelated(3, 100, 0, 0.5, 0.5, 1.0, 0.0, 0.05, 11);
        let ds = synth_generate(&cfg).unwrap();
        // All three coordinates move together.
        for row in ds.rows() {
            let v: Vec<f64> = row.scores.iter().map(|s| s.unwrap()).collect();
            assert!((v[0] - v[1]).abs() < 1e-12);
            assert!((v[0] - v[2]).abs() < 1e-12);
        }
    }

    #[test]
    fn counts_are_respected() {
        let ds = synth_generate(&base_config()).unwrap();
        assert_eq!(ds.count_label(Label::Genuine), 50);
        assert_eq!(ds.count_label(Label::Imposter), 150);
    }
}
