use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crwm::eval::{
    run_experiment, Algorithm, DataSource, Execution, ExperimentConfig, SyntheticExpertSpec,
};
use crwm::io::{load_dataset, ClassSelector};

fn config(runs: usize, execution: Execution) -> ExperimentConfig {
    ExperimentConfig {
        runs,
        execution,
        ..ExperimentConfig::default()
    }
}

fn synthetic(c: &mut Criterion) {
    let spec = SyntheticExpertSpec::crossover(10_000, 0);
    let mut group = c.benchmark_group("synthetic_crossover_8_runs");
    group.sample_size(10);
    for algorithm in [Algorithm::Rwm, Algorithm::Crwm] {
        for execution in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(algorithm.id(), format!("{execution:?}"));
            group.bench_with_input(id, &execution, |b, &execution| {
                b.iter(|| {
                    run_experiment(
                        algorithm,
                        DataSource::Synthetic(black_box(&spec)),
                        &config(8, execution),
                    )
                })
            });
        }
    }
    group.finish();
}

fn dataset(c: &mut Criterion) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sonar.arff");
    let Ok(data) = load_dataset(&path, &ClassSelector::Last, None) else {
        return;
    };
    let mut group = c.benchmark_group("sonar_4_runs");
    group.sample_size(10);
    for algorithm in Algorithm::ALL {
        for execution in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(algorithm.id(), format!("{execution:?}"));
            group.bench_with_input(id, &execution, |b, &execution| {
                b.iter(|| {
                    run_experiment(
                        algorithm,
                        DataSource::Dataset(black_box(&data)),
                        &config(4, execution),
                    )
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, synthetic, dataset);
criterion_main!(benches);
