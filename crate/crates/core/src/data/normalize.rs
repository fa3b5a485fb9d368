use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::domain::{Example, FeatureVector};
use crate::error::{Error, Result};

/// Per-feature z-score parameters. `std` is the population standard
/// deviation; features with zero spread are only centred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormParams {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyStream);
        }
        let d = train.dimension();
        let n = train.len() as f64;
        let mut mean = vec![0.0; d];
        for ex in train.examples() {
            ex.x.for_each_entry(|i, v| mean[i] += v);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for ex in train.examples() {
            for (i, v) in ex.x.to_dense().into_iter().enumerate() {
                var[i] += (v - mean[i]).powi(2);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(Self { mean, std })
    }

    fn scale(&self, i: usize) -> f64 {
        if self.std[i] > 0.0 {
            self.std[i]
        } else {
            1.0
        }
    }

    /// Standardises every example; the output is dense.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.dimension() != self.mean.len() {
            return Err(Error::mismatch(self.mean.len(), data.dimension()));
        }
        let examples = data
            .examples()
            .iter()
            .map(|ex| {
                let x = ex
                    .x
                    .to_dense()
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| (v - self.mean[i]) / self.scale(i))
                    .collect();
                Ok(Example::new(FeatureVector::dense(x)?, ex.y))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(data.name.clone(), data.dimension(), examples)
    }

    /// One `index mean std` line per feature (0-based index).
    pub fn write_sidecar(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "# feature mean std (population)").map_err(|e| Error::io(path, e))?;
        for (i, (m, s)) in self.mean.iter().zip(&self.std).enumerate() {
            writeln!(out, "{i} {m} {s}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// Fits parameters on `train` and applies them to `train` and `others`.
pub fn zscore_normalize(
    train: &Dataset,
    others: &[&Dataset],
) -> Result<(Dataset, Vec<Dataset>, NormParams)> {
    let params = NormParams::fit(train)?;
    let normalized = params.apply(train)?;
    let rest = others
        .iter()
        .map(|d| params.apply(d))
        .collect::<Result<Vec<_>>>()?;
    Ok((normalized, rest, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Label;

    fn ds(rows: &[&[f64]]) -> Dataset {
        let examples = rows
            .iter()
            .map(|r| Example::new(FeatureVector::dense(r.to_vec()).unwrap(), Label::Zero))
            .collect();
        Dataset::new("t", rows[0].len(), examples).unwrap()
    }

    #[test]
    fn hand_example() {
        let train = ds(&[&[0.0], &[2.0]]);
        let (out, _, params) = zscore_normalize(&train, &[]).unwrap();
        assert_eq!(params.mean, vec![1.0]);
        assert_eq!(params.std, vec![1.0]);
        let xs: Vec<f64> = out.examples().iter().map(|e| e.x.get(0)).collect();
        assert_eq!(xs, vec![-1.0, 1.0]);
    }

    #[test]
    fn constant_column_is_centred_only() {
        let train = ds(&[&[5.0, 1.0], &[5.0, 3.0], &[5.0, 8.0]]);
        let other = ds(&[&[6.0, 0.0]]);
        let (out, rest, params) = zscore_normalize(&train, &[&other]).unwrap();
        assert!(out.examples().iter().all(|e| e.x.get(0) == 0.0));
        assert_eq!(params.std[0], 0.0);
        assert_eq!(rest[0].examples()[0].x.get(0), 1.0);
    }

    #[test]
    fn not_idempotent() {
        let train = ds(&[&[1.0], &[2.0], &[10.0]]);
        let params = NormParams::fit(&train).unwrap();
        let once = params.apply(&train).unwrap();
        let twice = params.apply(&once).unwrap();
        assert_ne!(once, twice);
    }

    #[test]
    fn sidecar_lines() {
        let train = ds(&[&[0.0, 1.0], &[2.0, 1.0]]);
        let params = NormParams::fit(&train).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("norm.txt");
        params.write_sidecar(&path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().nth(1), Some("0 1 1"));
        assert_eq!(text.lines().nth(2), Some("1 1 0"));
    }

    proptest::proptest! {
        #[test]
        fn standardised_train_has_zero_mean_unit_std(
            rows in proptest::collection::vec(proptest::collection::vec(-100.0f64..100.0, 3), 2..40)
        ) {
            let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            let train = ds(&refs);
            let (out, _, params) = zscore_normalize(&train, &[]).unwrap();
            let n = out.len() as f64;
            for i in 0..3 {
                let col: Vec<f64> = out.examples().iter().map(|e| e.x.get(i)).collect();
                let mean = col.iter().sum::<f64>() / n;
                let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
                proptest::prop_assert!(mean.abs() < 1e-9);
                if params.std[i] > 0.0 {
                    proptest::prop_assert!((std - 1.0).abs() < 1e-9);
                } else {
                    proptest::prop_assert!(std < 1e-9);
                }
            }
        }
    }
}
