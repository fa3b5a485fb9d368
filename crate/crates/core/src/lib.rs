//! Online transfer bagging (OTBag) for binary classification with a scarce
//! target domain and a plentiful, possibly conflicting, source domain.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`] and [`vote`]: feature vectors, labels, domain tags and the
//!   majority-vote primitive.
//! * [`learners`]: online perceptron and logistic base learners.
//! * [`sampling`]: seeded Poisson(1) resampling counts.
//! * [`ensemble`]: OTBag, OTBag-SDMV and OTBag-JDSMV training and prediction.
//! * [`data`]: loaders, normalisation and transfer-task construction.
//! * [`harness`]: repeated randomised experiments and reports.

pub mod data;
pub mod domain;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod harness;
pub mod learners;
pub mod sampling;
pub mod vote;

pub use domain::{DomainTag, Example, FeatureVector, Label, TaggedInstance};
pub use ensemble::{
    prequential_eval, train_jdsmv, train_otbag, train_sdmv, EnsembleConfig, JdsmvModel, Model,
    OtBagModel, SdmvModel, Segmentation,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use learners::{Classifier, LearnerKind, WeakLearner};
pub use sampling::{PoissonSource, SeededRng};
pub use vote::{majority_vote, vote_margin};
