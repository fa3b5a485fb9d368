//! Online transfer bagging and its two dominance-filtered variants.
//!
//! All three algorithms consume one merged, shuffled stream of source and
//! target instances. For every instance and every member `m` (in order) one
//! count `k ~ Poisson(1)` is drawn and `h_m` is updated `k` times.
//!
//! * [`train_otbag`] keeps only the `H` committee and votes over all of it.
//! * [`train_sdmv`] also trains an `F` committee on target instances (with the
//!   same `k`) and keeps the members whose prequential target accuracy is at
//!   least that of the `F` vote.
//! * [`train_jdsmv`] repeats that comparison per time segment and votes over
//!   the per-segment committees plus `F`.

mod dual;
mod format;

pub use dual::{
    train_jdsmv, train_sdmv, AccuracyLedger, DualModel, JdsmvModel, JdsmvTrainer, Observation,
    SdmvModel, SdmvTrainer, SegmentIndexSets, SegmentPlan, Segmentation,
};
pub use format::{load_model, read_model, save_model, write_model};

use serde::{Deserialize, Serialize};

use crate::domain::{stream_dimension, FeatureVector, Label, TaggedInstance};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::learners::{Classifier, LearnerKind, WeakLearner};
use crate::sampling::PoissonSource;
use crate::vote::majority_vote;

pub const DEFAULT_MEMBERS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Committee size `M`.
    pub members: usize,
    pub learner: LearnerKind,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            members: DEFAULT_MEMBERS,
            learner: LearnerKind::Perceptron,
        }
    }
}

impl EnsembleConfig {
    pub fn new(members: usize, learner: LearnerKind) -> Self {
        Self { members, learner }
    }

    pub fn validate(&self) -> Result<()> {
        if self.members == 0 {
            return Err(Error::BadConfig("committee size must be at least 1".into()));
        }
        self.learner.validate()
    }

    pub(crate) fn fresh_committee(&self, dimension: usize) -> Result<Vec<WeakLearner>> {
        self.validate()?;
        (0..self.members)
            .map(|_| WeakLearner::new(self.learner, dimension))
            .collect()
    }
}

/// Updates `learner` with `(x, y)` exactly `k` times.
pub(crate) fn repeat_update(
    learner: &mut WeakLearner,
    x: &FeatureVector,
    y: Label,
    k: u32,
) -> Result<()> {
    for _ in 0..k {
        learner.update(x, y)?;
    }
    Ok(())
}

/// Majority vote of the members selected by `indices`.
pub(crate) fn committee_vote<'a, I>(members: &[WeakLearner], indices: I, x: &FeatureVector) -> Result<Label>
where
    I: IntoIterator<Item = &'a usize>,
{
    let votes = indices
        .into_iter()
        .map(|&i| members[i].predict(x))
        .collect::<Result<Vec<_>>>()?;
    majority_vote(votes)
}

pub(crate) fn full_vote(members: &[WeakLearner], x: &FeatureVector) -> Result<Label> {
    let votes = members
        .iter()
        .map(|m| m.predict(x))
        .collect::<Result<Vec<_>>>()?;
    majority_vote(votes)
}

/// The plain bagged committee `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct OtBagModel {
    members: Vec<WeakLearner>,
}

impl OtBagModel {
    pub fn new(dimension: usize, config: &EnsembleConfig) -> Result<Self> {
        Ok(Self {
            members: config.fresh_committee(dimension)?,
        })
    }

    pub fn from_members(members: Vec<WeakLearner>) -> Result<Self> {
        check_committee(&members)?;
        Ok(Self { members })
    }

    pub fn members(&self) -> &[WeakLearner] {
        &self.members
    }

    /// Processes one stream instance. The domain tag is ignored.
    pub fn learn_one<P: PoissonSource>(
        &mut self,
        x: &FeatureVector,
        y: Label,
        draws: &mut P,
    ) -> Result<()> {
        self.check_dimension(x)?;
        for member in &mut self.members {
            let k = draws.draw();
            repeat_update(member, x, y, k)?;
        }
        Ok(())
    }
}

impl Classifier for OtBagModel {
    fn dimension(&self) -> usize {
        self.members[0].dimension()
    }

    fn predict(&self, x: &FeatureVector) -> Result<Label> {
        self.check_dimension(x)?;
        full_vote(&self.members, x)
    }
}

pub(crate) fn check_committee(members: &[WeakLearner]) -> Result<usize> {
    let first = members
        .first()
        .ok_or_else(|| Error::BadConfig("committee size must be at least 1".into()))?;
    let dimension = first.dimension();
    for m in members {
        if m.dimension() != dimension {
            return Err(Error::mismatch(dimension, m.dimension()));
        }
    }
    Ok(dimension)
}

/// Trains the unfiltered committee over the whole stream in arrival order.
pub fn train_otbag<P: PoissonSource>(
    stream: &[TaggedInstance],
    config: &EnsembleConfig,
    draws: &mut P,
) -> Result<OtBagModel> {
    let dimension = stream_dimension(stream)?;
    let mut model = OtBagModel::new(dimension, config)?;
    for inst in stream {
        model.learn_one(&inst.x, inst.y, draws)?;
    }
    Ok(model)
}

/// A trained model of any of the three algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    OtBag(OtBagModel),
    Sdmv(SdmvModel),
    Jdsmv(JdsmvModel),
}

impl Model {
    pub fn algorithm_name(&self) -> &'static str {
        match self {
            Model::OtBag(_) => "otbag",
            Model::Sdmv(_) => "sdmv",
            Model::Jdsmv(_) => "jdsmv",
        }
    }
}

impl Classifier for Model {
    fn dimension(&self) -> usize {
        match self {
            Model::OtBag(m) => m.dimension(),
            Model::Sdmv(m) => m.dimension(),
            Model::Jdsmv(m) => m.dimension(),
        }
    }

    fn predict(&self, x: &FeatureVector) -> Result<Label> {
        match self {
            Model::OtBag(m) => m.predict(x),
            Model::Sdmv(m) => m.predict(x),
            Model::Jdsmv(m) => m.predict(x),
        }
    }
}

impl From<OtBagModel> for Model {
    fn from(m: OtBagModel) -> Self {
        Model::OtBag(m)
    }
}

impl From<SdmvModel> for Model {
    fn from(m: SdmvModel) -> Self {
        Model::Sdmv(m)
    }
}

impl From<JdsmvModel> for Model {
    fn from(m: JdsmvModel) -> Self {
        Model::Jdsmv(m)
    }
}

/// A labelled evaluation item.
pub trait Labelled {
    fn features(&self) -> &FeatureVector;
    fn label(&self) -> Label;
}

impl Labelled for TaggedInstance {
    fn features(&self) -> &FeatureVector {
        &self.x
    }

    fn label(&self) -> Label {
        self.y
    }
}

impl Labelled for crate::domain::Example {
    fn features(&self) -> &FeatureVector {
        &self.x
    }

    fn label(&self) -> Label {
        self.y
    }
}

/// Fraction of `test` whose predicted label matches the true one. The model
/// is not updated.
pub fn prequential_eval<C, T>(model: &C, test: &[T]) -> Result<f64>
where
    C: Classifier + Sync,
    T: Labelled + Sync,
{
    prequential_eval_with(model, test, Execution::default())
}

pub fn prequential_eval_with<C, T>(model: &C, test: &[T], exec: Execution) -> Result<f64>
where
    C: Classifier + Sync,
    T: Labelled + Sync,
{
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let hits = exec.map(test, |t| {
        model
            .predict(t.features())
            .map(|p| usize::from(p == t.label()))
    });
    let correct = hits.into_iter().sum::<Result<usize>>()?;
    Ok(correct as f64 / test.len() as f64)
}
