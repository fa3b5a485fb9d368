//! Repeated randomised experiments over transfer tasks.
//!
//! Repetition `r` uses seed `base_seed + r` for the target split, the stream
//! order and the resampling counts, so any repetition can be rerun alone.
//! Repetitions are independent and run in parallel under
//! [`Execution::Parallel`]; results are always aggregated in repetition order.

mod config;
mod report;
pub mod selftest;
mod synth;

pub use config::{
    Algorithm, DataFormat, ExperimentConfig, FileTask, SynthKind, SyntheticSpec, TaskSpec,
    DEFAULT_ALPHA, DEFAULT_REPETITIONS, DEFAULT_TRAIN_FRACTION,
};
pub use report::{
    emit_report, format_cell, mean_std, parse_json_report, render_report, ReportFormat, ResultRow,
    ResultTable,
};
pub use synth::make_synthetic_task;

use std::path::Path;
use std::time::Instant;

use crate::data::{
    build_mixed_source, infer_svmlight_dimension, interleave_stream, load_dense_csv,
    load_svmlight, make_task, subsample, zscore_normalize, Dataset, TransferTask,
};
use crate::ensemble::{prequential_eval_with, train_jdsmv, train_otbag, train_sdmv, Model};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::sampling::{streams, SeededRng};

/// Source and target data loaded once and split per repetition.
#[derive(Debug, Clone)]
struct LoadedFiles {
    source: Dataset,
    target: Dataset,
}

#[derive(Debug, Clone)]
enum PreparedTask {
    Files(LoadedFiles),
    Synthetic(SyntheticSpec),
}

fn load_one(path: &Path, task: &FileTask, dimension: Option<usize>) -> Result<Dataset> {
    match task.format {
        DataFormat::Csv => load_dense_csv(path, &task.csv),
        DataFormat::Svmlight => {
            let d = match dimension {
                Some(d) => d,
                None => infer_svmlight_dimension(path)?,
            };
            load_svmlight(path, d)
        }
    }
}

fn load_files(task: &FileTask, config: &ExperimentConfig) -> Result<LoadedFiles> {
    let dimension = match (task.format, task.dimension) {
        (DataFormat::Svmlight, None) => Some(
            infer_svmlight_dimension(&task.source)?.max(infer_svmlight_dimension(&task.target)?),
        ),
        (_, d) => d,
    };
    let mut source = load_one(&task.source, task, dimension)?;
    let mut target = load_one(&task.target, task, dimension)?;
    if let Some(fraction) = config.subsample {
        source = subsample(&source, fraction, config.base_seed)?;
        target = subsample(&target, fraction, config.base_seed.wrapping_add(1))?;
    }
    if let Some(foreign_path) = &task.mixed_foreign {
        let foreign = load_one(foreign_path, task, task.dimension)?;
        source = build_mixed_source(&source, &foreign)?;
    }
    if source.dimension() != target.dimension() {
        return Err(Error::mismatch(target.dimension(), source.dimension()));
    }
    Ok(LoadedFiles { source, target })
}

fn prepare(config: &ExperimentConfig) -> Result<PreparedTask> {
    config.validate()?;
    match &config.task {
        TaskSpec::Files(f) => load_files(f, config).map(PreparedTask::Files),
        TaskSpec::Synthetic(s) => Ok(PreparedTask::Synthetic(s.clone())),
    }
}

fn task_name(prepared: &PreparedTask) -> String {
    match prepared {
        PreparedTask::Files(f) => format!("{}->{}", f.source.name, f.target.name),
        PreparedTask::Synthetic(s) => match s.kind {
            SynthKind::Aligned => "synthetic_aligned".to_string(),
            SynthKind::Flipped => "synthetic_flipped".to_string(),
        },
    }
}

fn zscore_task(task: TransferTask) -> Result<TransferTask> {
    let mut merged = task.source.examples().to_vec();
    merged.extend(task.target_train.examples().iter().cloned());
    let train = Dataset::new("train", task.dimension(), merged)?;
    let (_, mut parts, _) =
        zscore_normalize(&train, &[&task.source, &task.target_train, &task.target_test])?;
    let target_test = parts.pop().expect("three datasets");
    let target_train = parts.pop().expect("three datasets");
    let source = parts.pop().expect("three datasets");
    Ok(TransferTask {
        source,
        target_train,
        target_test,
        seed: task.seed,
    })
}

fn build_task(prepared: &PreparedTask, config: &ExperimentConfig, seed: u64) -> Result<TransferTask> {
    let task = match prepared {
        PreparedTask::Files(f) => make_task(&f.source, &f.target, config.train_fraction, seed)?,
        PreparedTask::Synthetic(s) => make_synthetic_task(s, seed)?,
    };
    if config.zscore {
        zscore_task(task)
    } else {
        Ok(task)
    }
}

/// Trains one algorithm on the repetition's task.
pub fn train_algorithm(
    algorithm: Algorithm,
    task: &TransferTask,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Model> {
    let ensemble = config.ensemble();
    let mut draws = SeededRng::with_stream(seed, streams::RESAMPLE);
    let model = match algorithm {
        Algorithm::OtBag => train_otbag(&interleave_stream(task, seed), &ensemble, &mut draws)?.into(),
        Algorithm::Sdmv => train_sdmv(&interleave_stream(task, seed), &ensemble, &mut draws)?.into(),
        Algorithm::Jdsmv => train_jdsmv(
            &interleave_stream(task, seed),
            &ensemble,
            config.segmentation(),
            &mut draws,
        )?
        .into(),
        Algorithm::TargetOnly => {
            let stream = interleave_stream(&task.without_source()?, seed);
            train_otbag(&stream, &ensemble, &mut draws)?.into()
        }
    };
    Ok(model)
}

/// Models of every configured algorithm for one repetition.
pub fn train_models(config: &ExperimentConfig, repetition: usize) -> Result<Vec<(Algorithm, Model)>> {
    let prepared = prepare(config)?;
    let seed = config.seed_for(repetition);
    let task = build_task(&prepared, config, seed)?;
    config
        .algorithms
        .iter()
        .map(|&a| train_algorithm(a, &task, config, seed).map(|m| (a, m)))
        .collect()
}

fn run_repetition(
    prepared: &PreparedTask,
    config: &ExperimentConfig,
    repetition: usize,
) -> Result<Vec<(f64, f64)>> {
    let seed = config.seed_for(repetition);
    let task = build_task(prepared, config, seed)?;
    config
        .algorithms
        .iter()
        .map(|&algo| {
            let start = Instant::now();
            let model = train_algorithm(algo, &task, config, seed)?;
            let acc = prequential_eval_with(&model, task.target_test.examples(), Execution::Sequential)?;
            Ok((acc, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Repetition {
            index: repetition,
            source: Box::new(e),
        })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    run_experiment_with(config, Execution::default())
}

/// Runs every repetition and aggregates one row per algorithm.
pub fn run_experiment_with(config: &ExperimentConfig, exec: Execution) -> Result<ResultTable> {
    let prepared = prepare(config)?;
    let per_rep = exec.map_range(config.repetitions, |r| run_repetition(&prepared, config, r));
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;
    let name = task_name(&prepared);
    let rows = config
        .algorithms
        .iter()
        .enumerate()
        .map(|(i, &algo)| {
            let accuracies = per_rep.iter().map(|rep| rep[i].0).collect();
            let seconds = per_rep.iter().map(|rep| rep[i].1).collect();
            ResultRow::new(name.clone(), algo, accuracies, seconds)
        })
        .collect();
    Ok(ResultTable { rows })
}

/// The same protocol with the source removed from every stream.
pub fn run_baseline_target_only(config: &ExperimentConfig) -> Result<ResultTable> {
    let config = ExperimentConfig {
        algorithms: vec![Algorithm::TargetOnly],
        ..config.clone()
    };
    run_experiment(&config)
}
