use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use otbag::data::interleave_stream;
use otbag::ensemble::{prequential_eval_with, train_jdsmv, EnsembleConfig, Segmentation};
use otbag::harness::{make_synthetic_task, run_experiment_with, ExperimentConfig, SynthKind, SyntheticSpec, TaskSpec};
use otbag::{Execution, SeededRng};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn repetitions(c: &mut Criterion) {
    let config = ExperimentConfig {
        task: TaskSpec::Synthetic(SyntheticSpec {
            kind: SynthKind::Flipped,
            ..Default::default()
        }),
        repetitions: 8,
        ..Default::default()
    };
    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_experiment_with(&config, exec).unwrap())
        });
    }
    group.finish();
}

fn batch_evaluation(c: &mut Criterion) {
    let spec = SyntheticSpec {
        n_test: 20_000,
        dimension: 50,
        ..Default::default()
    };
    let task = make_synthetic_task(&spec, 1).unwrap();
    let config = EnsembleConfig::new(25, Default::default());
    let model = train_jdsmv(
        &interleave_stream(&task, 1),
        &config,
        Segmentation::Count(10),
        &mut SeededRng::new(1),
    )
    .unwrap();
    let test = task.target_test.examples();
    let mut group = c.benchmark_group("prequential_eval");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| prequential_eval_with(&model, test, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, repetitions, batch_evaluation);
criterion_main!(benches);
