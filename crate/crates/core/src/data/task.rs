use rand::seq::SliceRandom;

use super::Dataset;
use crate::domain::{DomainTag, Example, TaggedInstance};
use crate::error::{Error, Result};
use crate::sampling::{streams, SeededRng};

/// Source data plus a disjoint train/test split of the target data.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferTask {
    pub source: Dataset,
    pub target_train: Dataset,
    pub target_test: Dataset,
    pub seed: u64,
}

impl TransferTask {
    pub fn dimension(&self) -> usize {
        self.target_train.dimension()
    }

    /// The same task without source instances.
    pub fn without_source(&self) -> Result<Self> {
        Ok(Self {
            source: Dataset::new(self.source.name.clone(), self.dimension(), Vec::new())?,
            ..self.clone()
        })
    }
}

/// Sizes of the per-class training quotas: `floor(fraction * n_c)` each, with
/// the remaining slots up to `floor(fraction * n)` going to the classes with
/// the largest fractional parts (label 0 first on ties).
fn stratified_quotas(class_sizes: [usize; 2], fraction: f64) -> [usize; 2] {
    let total: usize = class_sizes.iter().sum();
    let wanted = (fraction * total as f64).floor() as usize;
    let exact = class_sizes.map(|n| fraction * n as f64);
    let mut quotas = exact.map(|q| q.floor() as usize);
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut missing = wanted.saturating_sub(quotas.iter().sum());
    for c in order.iter().cycle().take(4) {
        if missing == 0 {
            break;
        }
        if quotas[*c] < class_sizes[*c] {
            quotas[*c] += 1;
            missing -= 1;
        }
    }
    quotas
}

/// Splits `target` into a stratified training part of `floor(fraction * N)`
/// instances and a test part holding the rest. `source` is used whole.
pub fn make_task(source: &Dataset, target: &Dataset, fraction: f64, seed: u64) -> Result<TransferTask> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::BadFraction(fraction));
    }
    if source.dimension() != target.dimension() {
        return Err(Error::mismatch(target.dimension(), source.dimension()));
    }
    let mut rng = SeededRng::with_stream(seed, streams::SPLIT);
    let mut by_class: [Vec<&Example>; 2] = [Vec::new(), Vec::new()];
    for ex in target.examples() {
        by_class[usize::from(ex.y.as_u8())].push(ex);
    }
    let quotas = stratified_quotas([by_class[0].len(), by_class[1].len()], fraction);
    if quotas.contains(&0) {
        return Err(Error::DegenerateSplit);
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, quota) in by_class.iter_mut().zip(quotas) {
        class.shuffle(rng.rng());
        train.extend(class[..quota].iter().map(|&e| e.clone()));
        test.extend(class[quota..].iter().map(|&e| e.clone()));
    }
    train.shuffle(rng.rng());
    test.shuffle(rng.rng());
    let d = target.dimension();
    Ok(TransferTask {
        source: source.clone(),
        target_train: Dataset::new(format!("{}_train", target.name), d, train)?,
        target_test: Dataset::new(format!("{}_test", target.name), d, test)?,
        seed,
    })
}

/// Merges source (tagged `Source`) and target training instances (tagged
/// `Target`) into one uniformly shuffled stream.
pub fn interleave_stream(task: &TransferTask, seed: u64) -> Vec<TaggedInstance> {
    let mut stream: Vec<TaggedInstance> = task
        .source
        .examples()
        .iter()
        .map(|e| e.clone().tagged(DomainTag::Source))
        .chain(
            task.target_train
                .examples()
                .iter()
                .map(|e| e.clone().tagged(DomainTag::Target)),
        )
        .collect();
    let mut rng = SeededRng::with_stream(seed, streams::INTERLEAVE);
    stream.shuffle(rng.rng());
    stream
}

/// Appends `foreign` to `primary`, truncating or zero-padding the foreign
/// vectors to the primary dimension.
pub fn build_mixed_source(primary: &Dataset, foreign: &Dataset) -> Result<Dataset> {
    if primary.is_empty() || foreign.is_empty() {
        return Err(Error::BadConfig("mixed source needs two nonempty datasets".into()));
    }
    let d = primary.dimension();
    let mut examples = primary.examples().to_vec();
    for ex in foreign.examples() {
        examples.push(Example::new(ex.x.resized(d)?, ex.y));
    }
    Dataset::new(format!("mix_{}", primary.name), d, examples)
}

/// Keeps a seeded random `fraction` of `data` (at least one instance), in
/// original order.
pub fn subsample(data: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::BadFraction(fraction));
    }
    let keep = ((fraction * data.len() as f64).round() as usize).clamp(1, data.len().max(1));
    let mut rng = SeededRng::with_stream(seed, streams::SUBSAMPLE);
    let mut picked: Vec<usize> = rand::seq::index::sample(rng.rng(), data.len(), keep.min(data.len())).into_vec();
    picked.sort_unstable();
    let examples = picked.into_iter().map(|i| data.examples()[i].clone()).collect();
    Dataset::new(data.name.clone(), data.dimension(), examples)
}

/// `(#source, #target)` instances in a stream.
#[cfg(test)]
fn tag_counts(stream: &[TaggedInstance]) -> (usize, usize) {
    let targets = stream.iter().filter(|i| i.is_target()).count();
    (stream.len() - targets, targets)
}
