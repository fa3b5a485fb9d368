use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::CsvOptions;
use crate::ensemble::{EnsembleConfig, Segmentation, DEFAULT_MEMBERS};
use crate::error::{Error, Result};
use crate::learners::LearnerKind;

pub const DEFAULT_ALPHA: usize = 10;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.4;
pub const DEFAULT_REPETITIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(rename = "otbag")]
    OtBag,
    Sdmv,
    Jdsmv,
    /// OTBag trained on the target training split alone.
    TargetOnly,
}

impl Algorithm {
    pub const PAPER_SET: [Algorithm; 3] = [Algorithm::OtBag, Algorithm::Sdmv, Algorithm::Jdsmv];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::OtBag => "otbag",
            Algorithm::Sdmv => "sdmv",
            Algorithm::Jdsmv => "jdsmv",
            Algorithm::TargetOnly => "target_only",
        }
    }

    /// Parses a comma-separated list such as `otbag,sdmv`.
    pub fn parse_list(list: &str) -> Result<Vec<Algorithm>> {
        let mut out = Vec::new();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let algo: Algorithm = name.parse()?;
            if !out.contains(&algo) {
                out.push(algo);
            }
        }
        if out.is_empty() {
            return Err(Error::BadConfig("no algorithms selected".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "otbag" => Ok(Algorithm::OtBag),
            "sdmv" | "otbag-sdmv" => Ok(Algorithm::Sdmv),
            "jdsmv" | "otbag-jdsmv" => Ok(Algorithm::Jdsmv),
            "target_only" | "target-only" | "baseline" => Ok(Algorithm::TargetOnly),
            other => Err(Error::BadConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    Csv,
    Svmlight,
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "svmlight" | "libsvm" | "svm" => Ok(DataFormat::Svmlight),
            other => Err(Error::BadConfig(format!("unknown data format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    /// Source drawn from the target distribution.
    Aligned,
    /// Source drawn from the target distribution with labels inverted.
    Flipped,
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aligned" => Ok(SynthKind::Aligned),
            "flipped" => Ok(SynthKind::Flipped),
            other => Err(Error::BadConfig(format!("unknown synthetic kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub kind: SynthKind,
    pub dimension: usize,
    pub n_source: usize,
    pub n_target: usize,
    pub n_test: usize,
    /// Distance between the two class means along the first axis.
    pub separation: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            kind: SynthKind::Aligned,
            dimension: 10,
            n_source: 1000,
            n_target: 40,
            n_test: 1000,
            separation: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileTask {
    pub source: PathBuf,
    pub target: PathBuf,
    pub format: DataFormat,
    /// Foreign-domain file appended to the source to form a `mix_` source.
    #[serde(default)]
    pub mixed_foreign: Option<PathBuf>,
    /// svmlight dimension; inferred from the files when absent.
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub csv: CsvOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskSpec {
    Files(FileTask),
    Synthetic(SyntheticSpec),
}

impl Default for TaskSpec {
    fn default() -> Self {
        TaskSpec::Synthetic(SyntheticSpec::default())
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub task: TaskSpec,
    pub members: usize,
    pub alpha: usize,
    /// Fixed JDSMV segment length; overrides `alpha` when set.
    pub segment_length: Option<usize>,
    /// Target share used for training (file tasks only).
    pub train_fraction: f64,
    pub repetitions: usize,
    pub base_seed: u64,
    pub learner: LearnerKind,
    pub algorithms: Vec<Algorithm>,
    /// Z-score features with statistics of the merged training data.
    pub zscore: bool,
    /// Keep this fraction of each loaded dataset (file tasks only).
    pub subsample: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: TaskSpec::default(),
            members: DEFAULT_MEMBERS,
            alpha: DEFAULT_ALPHA,
            segment_length: None,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            repetitions: DEFAULT_REPETITIONS,
            base_seed: 0,
            learner: LearnerKind::Perceptron,
            algorithms: Algorithm::PAPER_SET.to_vec(),
            zscore: false,
            subsample: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn ensemble(&self) -> EnsembleConfig {
        EnsembleConfig::new(self.members, self.learner)
    }

    pub fn segmentation(&self) -> Segmentation {
        match self.segment_length {
            Some(len) => Segmentation::Length(len),
            None => Segmentation::Count(self.alpha),
        }
    }

    pub fn seed_for(&self, repetition: usize) -> u64 {
        self.base_seed.wrapping_add(repetition as u64)
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble().validate()?;
        if self.repetitions == 0 {
            return Err(Error::BadConfig("repetitions must be at least 1".into()));
        }
        if self.alpha < 2 {
            return Err(Error::BadConfig(format!("alpha must be at least 2, got {}", self.alpha)));
        }
        if self.segment_length == Some(0) {
            return Err(Error::BadSegment("segment length must be positive".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::BadFraction(self.train_fraction));
        }
        if let Some(f) = self.subsample {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::BadFraction(f));
            }
        }
        if self.algorithms.is_empty() {
            return Err(Error::BadConfig("no algorithms selected".into()));
        }
        if let TaskSpec::Synthetic(s) = &self.task {
            if s.dimension == 0 || s.n_source == 0 || s.n_target == 0 || s.n_test == 0 {
                return Err(Error::BadConfig("synthetic dimension and counts must be positive".into()));
            }
            if !s.separation.is_finite() || s.separation < 0.0 {
                return Err(Error::BadConfig(format!("bad separation {}", s.separation)));
            }
        }
        Ok(())
    }
}
