//! Datasets, loaders and transfer-task construction.

mod io;
mod normalize;
mod task;

pub use io::{
    infer_svmlight_dimension, load_dense_csv, load_svmlight, write_dense_csv, write_svmlight,
    CsvOptions,
};
pub use normalize::{zscore_normalize, NormParams};
pub use task::{build_mixed_source, interleave_stream, make_task, subsample, TransferTask};

use crate::domain::{Example, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    dimension: usize,
    examples: Vec<Example>,
}

impl Dataset {
    /// Checks that every example has `dimension` features.
    pub fn new(name: impl Into<String>, dimension: usize, examples: Vec<Example>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::BadDimension);
        }
        if let Some(bad) = examples.iter().find(|e| e.x.dimension() != dimension) {
            return Err(Error::mismatch(dimension, bad.x.dimension()));
        }
        Ok(Self {
            name: name.into(),
            dimension,
            examples,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn into_examples(self) -> Vec<Example> {
        self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// `(#label 0, #label 1)`.
    pub fn label_counts(&self) -> (usize, usize) {
        let ones = self.examples.iter().filter(|e| e.y == Label::One).count();
        (self.examples.len() - ones, ones)
    }
}
