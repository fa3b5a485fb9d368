use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use otbag::data::{write_dense_csv, CsvOptions};
use otbag::ensemble::save_model;
use otbag::harness::{
    self, make_synthetic_task, render_report, selftest, Algorithm, DataFormat, ExperimentConfig,
    FileTask, ReportFormat, SynthKind, SyntheticSpec, TaskSpec,
};
use otbag::{Error, Execution, LearnerKind, Result};

#[derive(Parser)]
#[command(name = "otbag", version, about = "Online transfer bagging experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the repeated protocol on source/target data files.
    Run(RunArgs),
    /// Run the protocol on a generated Gaussian transfer task.
    Synth(SynthArgs),
    /// Run the built-in sanity checks.
    Selftest,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated subset of otbag,sdmv,jdsmv,baseline.
    #[arg(long)]
    algos: Option<String>,
    /// Committee size M.
    #[arg(long)]
    m: Option<usize>,
    /// Number of JDSMV time segments.
    #[arg(long)]
    alpha: Option<usize>,
    /// Fixed JDSMV segment length (overrides --alpha).
    #[arg(long)]
    segment_length: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// perceptron or logistic.
    #[arg(long)]
    learner: Option<String>,
    /// Learning rate of the logistic learner.
    #[arg(long)]
    lr: Option<f64>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// table, csv or json.
    #[arg(long, default_value = "table")]
    report: String,
    /// Include per-repetition wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
    /// Run repetitions on one thread.
    #[arg(long)]
    sequential: bool,
    /// Save the models of repetition 0 into this directory.
    #[arg(long)]
    save_models: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    source: Option<PathBuf>,
    #[arg(long)]
    target: Option<PathBuf>,
    /// csv or svmlight.
    #[arg(long)]
    format: Option<String>,
    /// Foreign-domain file mixed into the source.
    #[arg(long)]
    mixed_foreign: Option<PathBuf>,
    /// svmlight feature dimension; inferred when absent.
    #[arg(long)]
    dim: Option<usize>,
    /// CSV files start with a header row.
    #[arg(long)]
    header: bool,
    /// 0-based CSV label column (default: last).
    #[arg(long)]
    label_column: Option<usize>,
    /// CSV label value treated as class 1.
    #[arg(long)]
    positive: Option<String>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Keep this fraction of each loaded dataset.
    #[arg(long)]
    subsample: Option<f64>,
    /// Z-score features using the training data.
    #[arg(long)]
    zscore: bool,
    #[command(flatten)]
    common: ExperimentArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// aligned or flipped.
    #[arg(long, default_value = "aligned")]
    kind: String,
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 1000)]
    n_source: usize,
    #[arg(long, default_value_t = 40)]
    n_target: usize,
    #[arg(long, default_value_t = 1000)]
    n_test: usize,
    #[arg(long, default_value_t = 4.0)]
    separation: f64,
    /// Also write the repetition-0 task as CSV files into this directory.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[command(flatten)]
    common: ExperimentArgs,
}

fn base_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path),
        None => Ok(ExperimentConfig::default()),
    }
}

fn apply_common(config: &mut ExperimentConfig, args: &ExperimentArgs) -> Result<()> {
    if let Some(list) = &args.algos {
        config.algorithms = Algorithm::parse_list(list)?;
    }
    if let Some(m) = args.m {
        config.members = m;
    }
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    if args.segment_length.is_some() {
        config.segment_length = args.segment_length;
    }
    if let Some(reps) = args.reps {
        config.repetitions = reps;
    }
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    let current_lr = match config.learner {
        LearnerKind::Logistic { learning_rate } => learning_rate,
        LearnerKind::Perceptron => otbag::learners::DEFAULT_LEARNING_RATE,
    };
    match args.learner.as_deref() {
        Some("perceptron") => config.learner = LearnerKind::Perceptron,
        Some("logistic") => {
            config.learner = LearnerKind::Logistic {
                learning_rate: args.lr.unwrap_or(current_lr),
            }
        }
        Some(other) => return Err(Error::BadConfig(format!("unknown learner `{other}`"))),
        None => {
            if let (Some(lr), LearnerKind::Logistic { .. }) = (args.lr, config.learner) {
                config.learner = LearnerKind::Logistic { learning_rate: lr };
            }
        }
    }
    Ok(())
}

fn run_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = base_config(&args.common)?;
    let mut files = match &config.task {
        TaskSpec::Files(f) => Some(f.clone()),
        TaskSpec::Synthetic(_) => None,
    };
    if let (Some(source), Some(target)) = (&args.source, &args.target) {
        files = Some(FileTask {
            source: source.clone(),
            target: target.clone(),
            format: DataFormat::Csv,
            mixed_foreign: None,
            dimension: None,
            csv: CsvOptions::default(),
        });
    } else if args.source.is_some() || args.target.is_some() {
        let task = files.as_mut().ok_or_else(|| {
            Error::BadConfig("--source and --target must be given together".into())
        })?;
        if let Some(s) = &args.source {
            task.source = s.clone();
        }
        if let Some(t) = &args.target {
            task.target = t.clone();
        }
    }
    let mut files = files.ok_or_else(|| {
        Error::BadConfig("`run` needs --source and --target (or a files task in --config)".into())
    })?;
    if let Some(format) = &args.format {
        files.format = format.parse()?;
    }
    if args.mixed_foreign.is_some() {
        files.mixed_foreign = args.mixed_foreign.clone();
    }
    if args.dim.is_some() {
        files.dimension = args.dim;
    }
    if args.header {
        files.csv.has_header = true;
    }
    if args.label_column.is_some() {
        files.csv.label_column = args.label_column;
    }
    if let Some(p) = &args.positive {
        files.csv.positive_value = p.clone();
    }
    config.task = TaskSpec::Files(files);
    if let Some(f) = args.train_fraction {
        config.train_fraction = f;
    }
    if args.subsample.is_some() {
        config.subsample = args.subsample;
    }
    if args.zscore {
        config.zscore = true;
    }
    apply_common(&mut config, &args.common)?;
    Ok(config)
}

fn synth_config(args: &SynthArgs) -> Result<ExperimentConfig> {
    let mut config = base_config(&args.common)?;
    let kind: SynthKind = args.kind.parse()?;
    config.task = TaskSpec::Synthetic(SyntheticSpec {
        kind,
        dimension: args.d,
        n_source: args.n_source,
        n_target: args.n_target,
        n_test: args.n_test,
        separation: args.separation,
    });
    apply_common(&mut config, &args.common)?;
    Ok(config)
}

fn create_dir(dir: &PathBuf) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })
}

fn execute(config: &ExperimentConfig, args: &ExperimentArgs) -> Result<()> {
    let format: ReportFormat = args.report.parse()?;
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let table = harness::run_experiment_with(config, exec)?;
    let text = render_report(&table, format, args.timings)?;
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?,
        None => print!("{text}"),
    }
    if let Some(dir) = &args.save_models {
        create_dir(dir)?;
        for (algo, model) in harness::train_models(config, 0)? {
            save_model(&model, dir.join(format!("rep0_{algo}.model")))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let config = run_config(&args)?;
            execute(&config, &args.common)?;
        }
        Command::Synth(args) => {
            let config = synth_config(&args)?;
            if let (Some(dir), TaskSpec::Synthetic(spec)) = (&args.dump, &config.task) {
                create_dir(dir)?;
                let task = make_synthetic_task(spec, config.seed_for(0))?;
                write_dense_csv(&task.source, dir.join("source.csv"))?;
                write_dense_csv(&task.target_train, dir.join("target_train.csv"))?;
                write_dense_csv(&task.target_test, dir.join("target_test.csv"))?;
            }
            execute(&config, &args.common)?;
        }
        Command::Selftest => {
            let outcomes = selftest::run_all();
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                println!("{status} {:<20} {}", o.name, o.detail);
            }
            return Ok(outcomes.iter().all(|o| o.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("{}: {err}", err.name());
            ExitCode::FAILURE
        }
    }
}
