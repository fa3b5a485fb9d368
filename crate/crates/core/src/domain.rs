//! Value types shared by every algorithm: feature vectors, binary labels and
//! domain-tagged training instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real-valued feature vector in either dense or sparse form.
///
/// Both forms are validated on construction: every value is finite and, for
/// the sparse form, indices are strictly ascending and below the dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureVector {
    Dense(Vec<f64>),
    Sparse {
        dimension: usize,
        indices: Vec<usize>,
        values: Vec<f64>,
    },
}

impl FeatureVector {
    pub fn dense(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadDimension);
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidFeature(format!("non-finite value {v}")));
        }
        Ok(FeatureVector::Dense(values))
    }

    /// Builds a sparse vector from `(index, value)` pairs with 0-based,
    /// strictly ascending indices.
    pub fn sparse(dimension: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::BadDimension);
        }
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (index, value) in entries {
            if index >= dimension {
                return Err(Error::InvalidFeature(format!(
                    "index {index} outside dimension {dimension}"
                )));
            }
            if let Some(&last) = indices.last() {
                if index <= last {
                    return Err(Error::InvalidFeature(format!(
                        "index {index} follows {last}; indices must be strictly ascending"
                    )));
                }
            }
            if !value.is_finite() {
                return Err(Error::InvalidFeature(format!("non-finite value {value}")));
            }
            indices.push(index);
            values.push(value);
        }
        Ok(FeatureVector::Sparse {
            dimension,
            indices,
            values,
        })
    }

    pub fn zeros(dimension: usize) -> Result<Self> {
        Self::sparse(dimension, Vec::new())
    }

    pub fn dimension(&self) -> usize {
        match self {
            FeatureVector::Dense(v) => v.len(),
            FeatureVector::Sparse { dimension, .. } => *dimension,
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, FeatureVector::Sparse { .. })
    }

    /// Value at `index`, zero for absent sparse entries.
    pub fn get(&self, index: usize) -> f64 {
        match self {
            FeatureVector::Dense(v) => v.get(index).copied().unwrap_or(0.0),
            FeatureVector::Sparse {
                indices, values, ..
            } => indices
                .binary_search(&index)
                .map(|pos| values[pos])
                .unwrap_or(0.0),
        }
    }

    /// Calls `f(index, value)` for every stored entry in ascending order.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, f64)) {
        match self {
            FeatureVector::Dense(v) => v.iter().enumerate().for_each(|(i, &x)| f(i, x)),
            FeatureVector::Sparse {
                indices, values, ..
            } => indices
                .iter()
                .zip(values)
                .for_each(|(&i, &x)| f(i, x)),
        }
    }

    /// Inner product with a dense weight vector of the same dimension.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        debug_assert_eq!(weights.len(), self.dimension());
        match self {
            FeatureVector::Dense(v) => v.iter().zip(weights).map(|(a, b)| a * b).sum(),
            FeatureVector::Sparse {
                indices, values, ..
            } => indices
                .iter()
                .zip(values)
                .map(|(&i, &x)| weights[i] * x)
                .sum(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            FeatureVector::Dense(v) => v.clone(),
            FeatureVector::Sparse { dimension, .. } => {
                let mut out = vec![0.0; *dimension];
                self.for_each_entry(|i, x| out[i] = x);
                out
            }
        }
    }

    /// Truncates or zero-pads to `dimension`, keeping the leading coordinates.
    /// The storage form is preserved.
    pub fn resized(&self, dimension: usize) -> Result<Self> {
        match self {
            FeatureVector::Dense(v) => {
                let mut out: Vec<f64> = v.iter().copied().take(dimension).collect();
                out.resize(dimension, 0.0);
                Self::dense(out)
            }
            FeatureVector::Sparse {
                indices, values, ..
            } => Self::sparse(
                dimension,
                indices
                    .iter()
                    .zip(values)
                    .filter(|(&i, _)| i < dimension)
                    .map(|(&i, &x)| (i, x))
                    .collect(),
            ),
        }
    }
}

/// Binary class label, stored as 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::One
        } else {
            Label::Zero
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Label::Zero => 0,
            Label::One => 1,
        }
    }

    /// `-1.0` for label 0 and `+1.0` for label 1.
    pub fn sign(self) -> f64 {
        match self {
            Label::Zero => -1.0,
            Label::One => 1.0,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_u8())
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Zero => Label::One,
            Label::One => Label::Zero,
        }
    }
}

impl TryFrom<u8> for Label {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Label::Zero),
            1 => Ok(Label::One),
            other => Err(Error::NotBinary(vec![other.to_string()])),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainTag {
    Source,
    Target,
}

/// A labelled instance without domain information.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: FeatureVector,
    pub y: Label,
}

impl Example {
    pub fn new(x: FeatureVector, y: Label) -> Self {
        Self { x, y }
    }

    pub fn tagged(self, domain: DomainTag) -> TaggedInstance {
        TaggedInstance {
            x: self.x,
            y: self.y,
            domain,
        }
    }
}

/// One element of the merged training stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedInstance {
    pub x: FeatureVector,
    pub y: Label,
    pub domain: DomainTag,
}

impl TaggedInstance {
    pub fn new(x: FeatureVector, y: Label, domain: DomainTag) -> Self {
        Self { x, y, domain }
    }

    pub fn is_target(&self) -> bool {
        self.domain == DomainTag::Target
    }
}

/// Checks that every instance of `stream` shares one dimension and returns it.
pub(crate) fn stream_dimension(stream: &[TaggedInstance]) -> Result<usize> {
    let first = stream.first().ok_or(Error::EmptyStream)?;
    let dimension = first.x.dimension();
    for inst in stream {
        if inst.x.dimension() != dimension {
            return Err(Error::mismatch(dimension, inst.x.dimension()));
        }
    }
    Ok(dimension)
}
