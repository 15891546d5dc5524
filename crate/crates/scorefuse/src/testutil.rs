//! Small dataset builders shared by unit, integration, and acceptance tests.

#![doc(hidden)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Label, ScoreDataset, ScoreVector};

/// The four-subject face/fingerprint/iris demo table used throughout the
/// docs: two rows are incomplete (subject1 is missing its face score,
/// subject3 its fingerprint score).
pub fn demo_scores() -> ScoreDataset {
    let mk = |probe: &str, scores: Vec<Option<f64>>| ScoreVector {
        probe_id: probe.to_string(),
        gallery_id: probe.to_string(),
        label: Label::Genuine,
        scores,
    };
    ScoreDataset::from_parts(
        vec!["face".into(), "fingerprint".into(), "iris".into()],
        vec![
            mk("subject1", vec![None, Some(0.74), Some(1.00)]),
            mk("subject2", vec![Some(0.41), Some(0.89), Some(0.47)]),
            mk("subject3", vec![Some(0.27), None, Some(0.03)]),
            mk("subject4", vec![Some(0.85), Some(0.00), Some(0.31)]),
        ],
        "demo",
    )
    .unwrap()
}

/// A complete dataset with `n_subjects` subjects and `m` modalities: one
/// genuine row per subject plus three imposter rows per subject, scores drawn
/// uniformly from [0, 1].
pub fn complete_dataset(n_subjects: usize, m: usize, seed: u64) -> ScoreDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let id = |i: usize| format!("s{i:04}");
    for i in 0..n_subjects {
        let scores = (0..m).map(|_| Some(rng.random_range(0.0..1.0))).collect();
        rows.push(ScoreVector {
            probe_id: id(i),
            gallery_id: id(i),
            label: Label::Genuine,
            scores,
        });
        let pool = n_subjects.max(2);
        for k in 1..=3usize {
            let offset = 1 + (k - 1) % (pool - 1);
            let scores = (0..m).map(|_| Some(rng.random_range(0.0..1.0))).collect();
            rows.push(ScoreVector {
                probe_id: id(i),
                gallery_id: id((i + offset) % pool),
                label: Label::Imposter,
                scores,
            });
        }
    }
    let modalities = (0..m).map(|j| format!("m{}", j + 1)).collect();
    ScoreDataset::from_parts(modalities, rows, "test").unwrap()
}
