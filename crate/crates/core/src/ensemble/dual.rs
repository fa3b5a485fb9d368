use serde::{Deserialize, Serialize};

use super::{check_committee, committee_vote, full_vote, repeat_update, EnsembleConfig};
use crate::domain::{stream_dimension, FeatureVector, Label, TaggedInstance};
use crate::error::{Error, Result};
use crate::learners::{Classifier, WeakLearner};
use crate::sampling::PoissonSource;
use crate::vote::majority_vote;

/// Prequential correct-prediction counters over target instances.
///
/// Each target instance is scored once, before any update it triggers.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AccuracyLedger {
    /// Correct predictions of each `h_m`.
    pub acc_h: Vec<u64>,
    /// Correct predictions of the `F` majority vote.
    pub acc_f: u64,
    pub n_target_seen: u64,
}

impl AccuracyLedger {
    pub fn new(members: usize) -> Self {
        Self {
            acc_h: vec![0; members],
            acc_f: 0,
            n_target_seen: 0,
        }
    }

    pub fn absorb(&mut self, obs: &Observation) {
        debug_assert_eq!(obs.h_correct.len(), self.acc_h.len());
        for (acc, &hit) in self.acc_h.iter_mut().zip(&obs.h_correct) {
            *acc += u64::from(hit);
        }
        self.acc_f += u64::from(obs.f_correct);
        self.n_target_seen += 1;
    }

    /// Members `m` with `acc_h[m] >= acc_f`, ascending.
    pub fn dominating(&self) -> Vec<usize> {
        self.acc_h
            .iter()
            .enumerate()
            .filter(|(_, &acc)| acc >= self.acc_f)
            .map(|(m, _)| m)
            .collect()
    }
}

/// Correctness of every `h_m` and of the `F` vote on one target instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub h_correct: Vec<bool>,
    pub f_correct: bool,
}

/// The `H` committee (trained on everything) and the `F` committee (trained on
/// target instances only), with the run-wide ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct DualModel {
    h_members: Vec<WeakLearner>,
    f_members: Vec<WeakLearner>,
    ledger: AccuracyLedger,
}

impl DualModel {
    pub fn new(dimension: usize, config: &EnsembleConfig) -> Result<Self> {
        let h_members = config.fresh_committee(dimension)?;
        let f_members = h_members.clone();
        Ok(Self {
            ledger: AccuracyLedger::new(config.members),
            h_members,
            f_members,
        })
    }

    pub fn from_parts(
        h_members: Vec<WeakLearner>,
        f_members: Vec<WeakLearner>,
        ledger: AccuracyLedger,
    ) -> Result<Self> {
        let dh = check_committee(&h_members)?;
        let df = check_committee(&f_members)?;
        if h_members.len() != f_members.len() || ledger.acc_h.len() != h_members.len() {
            return Err(Error::BadConfig(format!(
                "committee sizes disagree: |H| = {}, |F| = {}, ledger = {}",
                h_members.len(),
                f_members.len(),
                ledger.acc_h.len()
            )));
        }
        if dh != df {
            return Err(Error::mismatch(dh, df));
        }
        Ok(Self {
            h_members,
            f_members,
            ledger,
        })
    }

    pub fn h_members(&self) -> &[WeakLearner] {
        &self.h_members
    }

    pub fn f_members(&self) -> &[WeakLearner] {
        &self.f_members
    }

    pub fn ledger(&self) -> &AccuracyLedger {
        &self.ledger
    }

    pub fn members(&self) -> usize {
        self.h_members.len()
    }

    pub fn f_vote(&self, x: &FeatureVector) -> Result<Label> {
        full_vote(&self.f_members, x)
    }

    pub fn h_vote(&self, x: &FeatureVector) -> Result<Label> {
        full_vote(&self.h_members, x)
    }

    /// Scores every `h_m` and the `F` vote on `(x, y)` without training.
    pub fn observe(&self, x: &FeatureVector, y: Label) -> Result<Observation> {
        let h_correct = self
            .h_members
            .iter()
            .map(|h| h.predict(x).map(|p| p == y))
            .collect::<Result<Vec<_>>>()?;
        let f_correct = self.f_vote(x)? == y;
        Ok(Observation {
            h_correct,
            f_correct,
        })
    }

    /// Test-then-train on one stream instance; returns the observation for
    /// target instances.
    fn learn_one<P: PoissonSource>(
        &mut self,
        inst: &TaggedInstance,
        draws: &mut P,
    ) -> Result<Option<Observation>> {
        self.check_dimension(&inst.x)?;
        let obs = if inst.is_target() {
            let obs = self.observe(&inst.x, inst.y)?;
            self.ledger.absorb(&obs);
            Some(obs)
        } else {
            None
        };
        for (h, f) in self.h_members.iter_mut().zip(&mut self.f_members) {
            let k = draws.draw();
            repeat_update(h, &inst.x, inst.y, k)?;
            if inst.is_target() {
                repeat_update(f, &inst.x, inst.y, k)?;
            }
        }
        Ok(obs)
    }
}

impl Classifier for DualModel {
    fn dimension(&self) -> usize {
        self.h_members[0].dimension()
    }

    /// Vote of the full `H` committee.
    fn predict(&self, x: &FeatureVector) -> Result<Label> {
        self.check_dimension(x)?;
        self.h_vote(x)
    }
}

/// `H` filtered down to the members that matched or beat `F` on the target
/// stream.
#[derive(Debug, Clone, PartialEq)]
pub struct SdmvModel {
    dual: DualModel,
    surviving: Vec<usize>,
}

impl SdmvModel {
    /// Applies the dominance filter to a trained dual model.
    pub fn from_dual(dual: DualModel) -> Self {
        let surviving = dual.ledger.dominating();
        Self { dual, surviving }
    }

    /// Rebuilds a model with an explicit surviving set (0-based indices).
    pub fn from_parts(dual: DualModel, mut surviving: Vec<usize>) -> Result<Self> {
        surviving.sort_unstable();
        surviving.dedup();
        if let Some(&bad) = surviving.iter().find(|&&m| m >= dual.members()) {
            return Err(Error::BadConfig(format!(
                "surviving index {bad} outside committee of {}",
                dual.members()
            )));
        }
        Ok(Self { dual, surviving })
    }

    pub fn dual(&self) -> &DualModel {
        &self.dual
    }

    /// 0-based indices of the surviving `h` members.
    pub fn surviving(&self) -> &[usize] {
        &self.surviving
    }

    /// True when no member dominated and prediction falls back to `F`.
    pub fn fallback_to_f(&self) -> bool {
        self.surviving.is_empty()
    }
}

impl Classifier for SdmvModel {
    fn dimension(&self) -> usize {
        self.dual.dimension()
    }

    fn predict(&self, x: &FeatureVector) -> Result<Label> {
        self.check_dimension(x)?;
        if self.fallback_to_f() {
            self.dual.f_vote(x)
        } else {
            committee_vote(&self.dual.h_members, &self.surviving, x)
        }
    }
}

/// Incremental SDMV training; [`SdmvTrainer::snapshot`] yields a usable
/// model at any point of the stream.
#[derive(Debug, Clone)]
pub struct SdmvTrainer {
    dual: DualModel,
}

impl SdmvTrainer {
    pub fn new(dimension: usize, config: &EnsembleConfig) -> Result<Self> {
        Ok(Self {
            dual: DualModel::new(dimension, config)?,
        })
    }

    pub fn learn_one<P: PoissonSource>(&mut self, inst: &TaggedInstance, draws: &mut P) -> Result<()> {
        self.dual.learn_one(inst, draws).map(drop)
    }

    pub fn ledger(&self) -> &AccuracyLedger {
        &self.dual.ledger
    }

    pub fn snapshot(&self) -> Result<SdmvModel> {
        if self.dual.ledger.n_target_seen == 0 {
            return Err(Error::NoTargetData);
        }
        Ok(SdmvModel::from_dual(self.dual.clone()))
    }

    pub fn finish(self) -> Result<SdmvModel> {
        if self.dual.ledger.n_target_seen == 0 {
            return Err(Error::NoTargetData);
        }
        Ok(SdmvModel::from_dual(self.dual))
    }
}

pub fn train_sdmv<P: PoissonSource>(
    stream: &[TaggedInstance],
    config: &EnsembleConfig,
    draws: &mut P,
) -> Result<SdmvModel> {
    let dimension = stream_dimension(stream)?;
    let mut trainer = SdmvTrainer::new(dimension, config)?;
    for inst in stream {
        trainer.learn_one(inst, draws)?;
    }
    trainer.finish()
}

/// How the stream is cut into time segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segmentation {
    /// `alpha` segments of `floor(len / alpha)` instances over a stream of
    /// known length; leftover instances join the last segment.
    Count(usize),
    /// Segments of a fixed number of instances; the final segment may be
    /// shorter. Usable when the stream length is unknown.
    Length(usize),
}

impl Segmentation {
    pub fn plan(self, stream_len: usize) -> Result<SegmentPlan> {
        if stream_len == 0 {
            return Err(Error::EmptyStream);
        }
        match self {
            Segmentation::Count(alpha) => {
                if alpha < 2 {
                    return Err(Error::BadSegment(format!("alpha must be at least 2, got {alpha}")));
                }
                let length = stream_len / alpha;
                if length == 0 {
                    return Err(Error::BadSegment(format!(
                        "stream of {stream_len} instances cannot fill {alpha} segments"
                    )));
                }
                Ok(SegmentPlan {
                    length,
                    max_segments: Some(alpha),
                })
            }
            Segmentation::Length(length) => {
                let plan = SegmentPlan::fixed(length)?;
                if stream_len < 2 * length {
                    return Err(Error::BadSegment(format!(
                        "stream of {stream_len} instances is shorter than two segments of {length}"
                    )));
                }
                Ok(plan)
            }
        }
    }
}

/// Maps stream positions to segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentPlan {
    pub length: usize,
    /// Cap on the segment count; positions past the cap join the last segment.
    pub max_segments: Option<usize>,
}

impl SegmentPlan {
    pub fn fixed(length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::BadSegment("segment length must be positive".into()));
        }
        Ok(Self {
            length,
            max_segments: None,
        })
    }

    /// 0-based segment of the 0-based stream position `n`.
    pub fn segment_of(&self, n: usize) -> usize {
        let seg = n / self.length;
        match self.max_segments {
            Some(cap) => seg.min(cap - 1),
            None => seg,
        }
    }
}

/// Dominating member sets recorded at the end of every segment after the
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentIndexSets {
    /// Instances per segment.
    pub segment_length: usize,
    /// One 0-based member index set per segment from the second onwards.
    pub sets: Vec<Vec<usize>>,
    /// Ledger of every segment, the first included.
    pub ledgers: Vec<AccuracyLedger>,
}

impl SegmentIndexSets {
    /// Total number of segments (`alpha`).
    pub fn segments(&self) -> usize {
        self.sets.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JdsmvModel {
    dual: DualModel,
    segments: SegmentIndexSets,
}

impl JdsmvModel {
    pub fn from_parts(dual: DualModel, segments: SegmentIndexSets) -> Result<Self> {
        if segments.sets.is_empty() {
            return Err(Error::BadSegment("at least one recorded segment is required".into()));
        }
        for set in &segments.sets {
            if let Some(&bad) = set.iter().find(|&&m| m >= dual.members()) {
                return Err(Error::BadConfig(format!(
                    "segment index {bad} outside committee of {}",
                    dual.members()
                )));
            }
        }
        Ok(Self { dual, segments })
    }

    pub fn dual(&self) -> &DualModel {
        &self.dual
    }

    pub fn segments(&self) -> &SegmentIndexSets {
        &self.segments
    }

    /// Decision of each recorded segment committee followed by the `F` vote.
    pub fn decisions(&self, x: &FeatureVector) -> Result<Vec<Label>> {
        self.check_dimension(x)?;
        let f = self.dual.f_vote(x)?;
        let mut out = Vec::with_capacity(self.segments.sets.len() + 1);
        for set in &self.segments.sets {
            out.push(if set.is_empty() {
                f
            } else {
                committee_vote(&self.dual.h_members, set, x)?
            });
        }
        out.push(f);
        Ok(out)
    }
}

impl Classifier for JdsmvModel {
    fn dimension(&self) -> usize {
        self.dual.dimension()
    }

    fn predict(&self, x: &FeatureVector) -> Result<Label> {
        majority_vote(self.decisions(x)?)
    }
}

#[derive(Debug, Clone)]
pub struct JdsmvTrainer {
    dual: DualModel,
    plan: SegmentPlan,
    seen: usize,
    sets: Vec<Vec<usize>>,
    ledgers: Vec<AccuracyLedger>,
}

impl JdsmvTrainer {
    pub fn new(dimension: usize, config: &EnsembleConfig, plan: SegmentPlan) -> Result<Self> {
        if plan.length == 0 || plan.max_segments.is_some_and(|c| c < 2) {
            return Err(Error::BadSegment(format!("invalid segment plan {plan:?}")));
        }
        Ok(Self {
            dual: DualModel::new(dimension, config)?,
            plan,
            seen: 0,
            sets: Vec::new(),
            ledgers: vec![AccuracyLedger::new(config.members)],
        })
    }

    fn current_segment(&self) -> usize {
        self.ledgers.len() - 1
    }

    fn close_segment(&mut self) {
        let seg = self.current_segment();
        if seg >= 1 {
            let ledger = &self.ledgers[seg];
            self.sets.push(if ledger.n_target_seen == 0 {
                Vec::new()
            } else {
                ledger.dominating()
            });
        }
    }

    pub fn learn_one<P: PoissonSource>(&mut self, inst: &TaggedInstance, draws: &mut P) -> Result<()> {
        let seg = self.plan.segment_of(self.seen);
        while self.current_segment() < seg {
            self.close_segment();
            self.ledgers.push(AccuracyLedger::new(self.dual.members()));
        }
        if let Some(obs) = self.dual.learn_one(inst, draws)? {
            let current = self.current_segment();
            self.ledgers[current].absorb(&obs);
        }
        self.seen += 1;
        Ok(())
    }

    pub fn seen(&self) -> usize {
        self.seen
    }

    /// Closes the running segment and builds the model. Needs at least two
    /// segments.
    pub fn finish(mut self) -> Result<JdsmvModel> {
        if self.seen == 0 {
            return Err(Error::EmptyStream);
        }
        self.close_segment();
        if self.sets.is_empty() {
            return Err(Error::BadSegment(format!(
                "{} instances fill only one segment of {}",
                self.seen, self.plan.length
            )));
        }
        let segments = SegmentIndexSets {
            segment_length: self.plan.length,
            sets: self.sets,
            ledgers: self.ledgers,
        };
        JdsmvModel::from_parts(self.dual, segments)
    }
}

pub fn train_jdsmv<P: PoissonSource>(
    stream: &[TaggedInstance],
    config: &EnsembleConfig,
    segmentation: Segmentation,
    draws: &mut P,
) -> Result<JdsmvModel> {
    let dimension = stream_dimension(stream)?;
    let plan = segmentation.plan(stream.len())?;
    let mut trainer = JdsmvTrainer::new(dimension, config, plan)?;
    for inst in stream {
        trainer.learn_one(inst, draws)?;
    }
    trainer.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainTag;
    use crate::ensemble::train_otbag;
    use crate::learners::LearnerKind;
    use crate::sampling::{ConstantDraws, SeededRng};

    fn inst(x: &[f64], y: u8, domain: DomainTag) -> TaggedInstance {
        TaggedInstance::new(
            FeatureVector::dense(x.to_vec()).unwrap(),
            Label::try_from(y).unwrap(),
            domain,
        )
    }

    fn mixed_stream(n: usize, seed: u64) -> Vec<TaggedInstance> {
        let mut rng = SeededRng::new(seed);
        (0..n)
            .map(|i| {
                let a = rng.uniform() * 2.0 - 1.0;
                let b = rng.uniform() * 2.0 - 1.0;
                let domain = if i % 3 == 0 { DomainTag::Target } else { DomainTag::Source };
                inst(&[a, b], u8::from(a + 0.3 * b > 0.0), domain)
            })
            .collect()
    }

    #[test]
    fn single_target_instance_labelled_zero() {
        let stream = vec![inst(&[1.0, 1.0], 0, DomainTag::Target)];
        let config = EnsembleConfig::new(3, LearnerKind::Perceptron);
        let model = train_sdmv(&stream, &config, &mut SeededRng::new(1)).unwrap();
        let ledger = model.dual().ledger();
        assert_eq!(ledger.acc_f, 1);
        assert_eq!(ledger.acc_h, vec![1, 1, 1]);
        assert_eq!(model.surviving(), &[0, 1, 2]);
        assert!(!model.fallback_to_f());
    }

    #[test]
    fn no_target_data() {
        let stream = vec![inst(&[1.0, 1.0], 0, DomainTag::Source)];
        assert!(matches!(
            train_sdmv(&stream, &EnsembleConfig::default(), &mut ConstantDraws(1)),
            Err(Error::NoTargetData)
        ));
    }

    #[test]
    fn ledger_bounds_and_target_count() {
        let stream = mixed_stream(90, 5);
        let config = EnsembleConfig::new(5, LearnerKind::Perceptron);
        let model = train_sdmv(&stream, &config, &mut SeededRng::new(9)).unwrap();
        let ledger = model.dual().ledger();
        let targets = stream.iter().filter(|i| i.is_target()).count() as u64;
        assert_eq!(ledger.n_target_seen, targets);
        assert!(ledger.acc_f <= targets);
        assert!(ledger.acc_h.iter().all(|&a| a <= targets));
    }

    #[test]
    fn sdmv_h_matches_otbag_h_for_same_draws() {
        let stream = mixed_stream(60, 2);
        let config = EnsembleConfig::new(4, LearnerKind::logistic());
        let bag = train_otbag(&stream, &config, &mut SeededRng::new(4)).unwrap();
        let sdmv = train_sdmv(&stream, &config, &mut SeededRng::new(4)).unwrap();
        assert_eq!(bag.members(), sdmv.dual().h_members());
    }

    #[test]
    fn full_survival_reduces_to_otbag_vote() {
        let stream = mixed_stream(60, 8);
        let config = EnsembleConfig::new(5, LearnerKind::Perceptron);
        let sdmv = train_sdmv(&stream, &config, &mut SeededRng::new(1)).unwrap();
        let all = SdmvModel::from_parts(sdmv.dual().clone(), (0..5).collect()).unwrap();
        let bag = super::super::OtBagModel::from_members(sdmv.dual().h_members().to_vec()).unwrap();
        for probe in mixed_stream(40, 77) {
            assert_eq!(all.predict(&probe.x).unwrap(), bag.predict(&probe.x).unwrap());
        }
    }

    #[test]
    fn fallback_uses_f_committee() {
        let stream = mixed_stream(30, 3);
        let config = EnsembleConfig::new(3, LearnerKind::Perceptron);
        let sdmv = train_sdmv(&stream, &config, &mut SeededRng::new(1)).unwrap();
        let fallback = SdmvModel::from_parts(sdmv.dual().clone(), vec![]).unwrap();
        assert!(fallback.fallback_to_f());
        for probe in mixed_stream(20, 11) {
            assert_eq!(
                fallback.predict(&probe.x).unwrap(),
                sdmv.dual().f_vote(&probe.x).unwrap()
            );
        }
    }

    #[test]
    fn f_members_ignore_source_content() {
        let stream = mixed_stream(45, 6);
        let mut altered = stream.clone();
        for i in altered.iter_mut().filter(|i| !i.is_target()) {
            i.x = FeatureVector::dense(vec![-9.0, 4.0]).unwrap();
            i.y = i.y.flipped();
        }
        let config = EnsembleConfig::new(3, LearnerKind::Perceptron);
        let a = train_sdmv(&stream, &config, &mut ConstantDraws(2)).unwrap();
        let b = train_sdmv(&altered, &config, &mut ConstantDraws(2)).unwrap();
        assert_eq!(a.dual().f_members(), b.dual().f_members());
    }

    #[test]
    fn segment_plans() {
        let plan = Segmentation::Count(3).plan(10).unwrap();
        assert_eq!(plan.length, 3);
        let segs: Vec<usize> = (0..10).map(|n| plan.segment_of(n)).collect();
        assert_eq!(segs, vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 2]);
        assert!(Segmentation::Count(1).plan(10).is_err());
        assert!(Segmentation::Count(11).plan(10).is_err());
        assert!(Segmentation::Length(0).plan(10).is_err());
        assert!(Segmentation::Length(6).plan(10).is_err());
        let fixed = Segmentation::Length(4).plan(10).unwrap();
        assert_eq!(fixed.segment_of(9), 2);
    }

    #[test]
    fn jdsmv_partition_invariants() {
        let stream = mixed_stream(103, 4);
        let config = EnsembleConfig::new(4, LearnerKind::Perceptron);
        for seg in [Segmentation::Count(2), Segmentation::Count(10), Segmentation::Length(7)] {
            let model = train_jdsmv(&stream, &config, seg, &mut SeededRng::new(2)).unwrap();
            let sets = model.segments();
            let per_segment: u64 = sets.ledgers.iter().map(|l| l.n_target_seen).sum();
            assert_eq!(per_segment, model.dual().ledger().n_target_seen);
            assert_eq!(sets.sets.len(), sets.ledgers.len() - 1);
            if let Segmentation::Count(alpha) = seg {
                assert_eq!(sets.segments(), alpha);
            }
        }
        let model = train_jdsmv(&stream, &config, Segmentation::Length(7), &mut SeededRng::new(2)).unwrap();
        assert_eq!(model.segments().segments(), 15);
    }

    #[test]
    fn jdsmv_segment_without_targets_records_empty_set() {
        let mut stream = vec![
            inst(&[1.0, 0.0], 1, DomainTag::Target),
            inst(&[0.0, 1.0], 0, DomainTag::Target),
        ];
        stream.push(inst(&[1.0, 1.0], 1, DomainTag::Source));
        stream.push(inst(&[1.0, -1.0], 0, DomainTag::Source));
        let config = EnsembleConfig::new(2, LearnerKind::Perceptron);
        let model =
            train_jdsmv(&stream, &config, Segmentation::Count(2), &mut ConstantDraws(1)).unwrap();
        assert_eq!(model.segments().sets, vec![Vec::<usize>::new()]);
        let x = FeatureVector::dense(vec![0.2, 0.9]).unwrap();
        let decisions = model.decisions(&x).unwrap();
        assert_eq!(decisions[0], model.dual().f_vote(&x).unwrap());
    }

    #[test]
    fn jdsmv_needs_two_segments() {
        let stream = mixed_stream(5, 1);
        let config = EnsembleConfig::new(2, LearnerKind::Perceptron);
        let plan = SegmentPlan::fixed(10).unwrap();
        let mut trainer = JdsmvTrainer::new(2, &config, plan).unwrap();
        for i in &stream {
            trainer.learn_one(i, &mut ConstantDraws(1)).unwrap();
        }
        assert!(matches!(trainer.finish(), Err(Error::BadSegment(_))));
        assert!(matches!(
            train_jdsmv(&[], &config, Segmentation::Count(2), &mut ConstantDraws(1)),
            Err(Error::EmptyStream)
        ));
    }

    #[test]
    fn training_is_deterministic() {
        let stream = mixed_stream(80, 12);
        let config = EnsembleConfig::default();
        let a = train_jdsmv(&stream, &config, Segmentation::Count(4), &mut SeededRng::new(5)).unwrap();
        let b = train_jdsmv(&stream, &config, Segmentation::Count(4), &mut SeededRng::new(5)).unwrap();
        assert_eq!(a, b);
    }
}
