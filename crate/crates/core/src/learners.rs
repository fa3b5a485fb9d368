//! Online linear base learners.
//!
//! Every learner scores `w·x + b` and predicts label 1 only for a strictly
//! positive score. Fresh learners start from all-zero parameters, so they
//! predict 0 everywhere.

use serde::{Deserialize, Serialize};

use crate::domain::{FeatureVector, Label};
use crate::error::{Error, Result};

pub const DEFAULT_LEARNING_RATE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerKind {
    /// Mistake-driven perceptron on `{-1,+1}` targets.
    #[default]
    Perceptron,
    /// One logistic-loss gradient step per update.
    Logistic { learning_rate: f64 },
}

impl LearnerKind {
    pub fn logistic() -> Self {
        LearnerKind::Logistic {
            learning_rate: DEFAULT_LEARNING_RATE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LearnerKind::Perceptron => Ok(()),
            LearnerKind::Logistic { learning_rate } if learning_rate.is_finite() && learning_rate > 0.0 => {
                Ok(())
            }
            LearnerKind::Logistic { learning_rate } => Err(Error::BadConfig(format!(
                "learning rate must be positive and finite, got {learning_rate}"
            ))),
        }
    }
}

/// Anything that maps a feature vector to a hard binary label.
pub trait Classifier {
    fn dimension(&self) -> usize;

    fn predict(&self, x: &FeatureVector) -> Result<Label>;

    fn check_dimension(&self, x: &FeatureVector) -> Result<()> {
        if x.dimension() == self.dimension() {
            Ok(())
        } else {
            Err(Error::mismatch(self.dimension(), x.dimension()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakLearner {
    kind: LearnerKind,
    weights: Vec<f64>,
    bias: f64,
}

impl WeakLearner {
    pub fn new(kind: LearnerKind, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::BadDimension);
        }
        kind.validate()?;
        Ok(Self {
            kind,
            weights: vec![0.0; dimension],
            bias: 0.0,
        })
    }

    /// Rebuilds a learner from stored parameters.
    pub fn from_parts(kind: LearnerKind, weights: Vec<f64>, bias: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::BadDimension);
        }
        kind.validate()?;
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidFeature("non-finite learner parameter".into()));
        }
        Ok(Self {
            kind,
            weights,
            bias,
        })
    }

    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn score(&self, x: &FeatureVector) -> Result<f64> {
        self.check_dimension(x)?;
        Ok(x.dot(&self.weights) + self.bias)
    }

    /// Applies one online update with the labelled instance `(x, y)`.
    pub fn update(&mut self, x: &FeatureVector, y: Label) -> Result<()> {
        let score = self.score(x)?;
        let step = match self.kind {
            LearnerKind::Perceptron => {
                if Label::from_bool(score > 0.0) == y {
                    return Ok(());
                }
                y.sign()
            }
            LearnerKind::Logistic { learning_rate } => learning_rate * (y.as_f64() - sigmoid(score)),
        };
        let weights = &mut self.weights;
        x.for_each_entry(|i, v| weights[i] += step * v);
        self.bias += step;
        Ok(())
    }
}

impl Classifier for WeakLearner {
    fn dimension(&self) -> usize {
        self.weights.len()
    }

    fn predict(&self, x: &FeatureVector) -> Result<Label> {
        Ok(Label::from_bool(self.score(x)? > 0.0))
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
