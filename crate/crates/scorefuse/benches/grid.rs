//! Grid-runner throughput: the sequential path (workers = 1) against the
//! rayon pool (all cores), on the same seeded workload. With the `parallel`
//! feature disabled only the sequential path exists.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use scorefuse::experiment::{run, BalanceMode, ExperimentConfig, ImputerSetting, InputSource};
use scorefuse::sim::TargetClass;
use scorefuse::synth::SynthConfig;

fn bench_config(workers: Option<usize>) -> ExperimentConfig {
    ExperimentConfig {
        input: Some(InputSource::Synth {
            config: SynthConfig::equicorrelated(4, 50, 4950, 0.7, 0.3, 0.7, 0.15, 0.12, 11),
        }),
        proportions: vec![20, 50, 80],
        variants: vec![TargetClass::Any],
        imputers: vec![
            ImputerSetting::None,
            ImputerSetting::Mean,
            ImputerSetting::MiceBayes,
            ImputerSetting::MiceTree,
            ImputerSetting::MiceKnn,
        ],
        balance: BalanceMode::Off,
        trials: 2,
        base_seed: 1234,
        workers,
        ..ExperimentConfig::default()
    }
}

fn grid_benches(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment_grid");
    group.sample_size(10);

    let sequential = bench_config(Some(1));
    group.bench_function("sequential", |b| {
        b.iter(|| run(black_box(&sequential)).unwrap())
    });

    #[cfg(feature = "parallel")]
    {
        let parallel = bench_config(None);
        group.bench_function("parallel", |b| {
            b.iter(|| run(black_box(&parallel)).unwrap())
        });
    }

    group.finish();
}

fn mice_transform_bench(c: &mut Criterion) {
    use scorefuse::impute::{fit, ImputerKind, ImputerSpec};
    use scorefuse::sim::{corrupt, CorruptionSpec};
    use scorefuse::synth::synth_generate;

    let data = synth_generate(&SynthConfig::equicorrelated(
        4, 0, 8000, 0.5, 0.5, 0.0, 0.6, 0.1, 3,
    ))
    .unwrap();
    let corrupted = corrupt(
        &data,
        &CorruptionSpec {
            proportion: 50,
            target: TargetClass::Any,
            seed: 4,
        },
    )
    .unwrap();

    let mut group = c.benchmark_group("mice_transform_8k_rows");
    group.sample_size(10);
    for kind in [ImputerKind::MiceBayes, ImputerKind::MiceTree, ImputerKind::MiceKnn] {
        let model = fit(&corrupted, &ImputerSpec::new(kind)).unwrap();
        group.bench_function(kind.as_str(), |b| {
            b.iter(|| model.transform(black_box(&corrupted)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, grid_benches, mice_transform_bench);
criterion_main!(benches);
