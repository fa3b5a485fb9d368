use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::domain::{Example, FeatureVector, Label};
use crate::error::{Error, Result};

/// Layout of a dense CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub has_header: bool,
    /// 0-based label column; `None` means the last column.
    pub label_column: Option<usize>,
    /// Label text mapped to class 1; every other value maps to class 0.
    pub positive_value: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            has_header: false,
            label_column: None,
            positive_value: "1".to_string(),
        }
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string())
}

fn parse_finite(token: &str, line: u64) -> Result<f64> {
    match token.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::BadNumber {
            line,
            token: token.to_string(),
        }),
    }
}

/// Loads a comma-separated file of dense features plus one label column.
pub fn load_dense_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut rows: Vec<(Vec<f64>, String)> = Vec::new();
    let mut labels = BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let width = record.len();
        if width < 2 {
            return Err(Error::RaggedCsv {
                record: line,
                message: format!("need a label and at least one feature, found {width} columns"),
            });
        }
        let label_at = options.label_column.unwrap_or(width - 1);
        if label_at >= width {
            return Err(Error::RaggedCsv {
                record: line,
                message: format!("label column {label_at} outside {width} columns"),
            });
        }
        let mut features = Vec::with_capacity(width - 1);
        let mut label = String::new();
        for (i, field) in record.iter().enumerate() {
            if i == label_at {
                label = field.to_string();
            } else {
                features.push(parse_finite(field, line)?);
            }
        }
        labels.insert(label.clone());
        if labels.len() > 2 {
            return Err(Error::NotBinary(labels.into_iter().collect()));
        }
        rows.push((features, label));
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }

    let dimension = rows[0].0.len();
    let examples = rows
        .into_iter()
        .map(|(x, label)| {
            Ok(Example::new(
                FeatureVector::dense(x)?,
                Label::from_bool(label == options.positive_value),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(dataset_name(path), dimension, examples)
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::RaggedCsv {
            record: line,
            message: format!("expected {expected_len} columns, found {len}"),
        },
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::RaggedCsv {
            record: line,
            message: format!("{other:?}"),
        },
    }
}

/// Writes features followed by a `0`/`1` label column, no header.
pub fn write_dense_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for ex in dataset.examples() {
        let mut line = String::new();
        for v in ex.x.to_dense() {
            line.push_str(&v.to_string());
            line.push(',');
        }
        line.push_str(&ex.y.as_u8().to_string());
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_svm_label(token: &str, line: u64) -> Result<Label> {
    match token.parse::<f64>() {
        Ok(1.0) => Ok(Label::One),
        Ok(v) if v == -1.0 || v == 0.0 => Ok(Label::Zero),
        _ => Err(Error::BadSparseLine {
            line,
            message: format!("label {token:?} is not one of -1, 0, +1, 1"),
        }),
    }
}

fn parse_svm_line(body: &str, line: u64, dimension: usize) -> Result<Example> {
    let mut tokens = body.split_whitespace();
    let label = parse_svm_label(tokens.next().unwrap_or_default(), line)?;
    let mut entries = Vec::new();
    let mut last: Option<u64> = None;
    for token in tokens {
        let (idx, val) = token.split_once(':').ok_or_else(|| Error::BadSparseLine {
            line,
            message: format!("expected index:value, found {token:?}"),
        })?;
        let index: u64 = idx.parse().map_err(|_| Error::BadSparseLine {
            line,
            message: format!("bad feature index {idx:?}"),
        })?;
        if index == 0 || index > dimension as u64 {
            return Err(Error::IndexOutOfRange {
                line,
                index,
                dimension,
            });
        }
        if last.is_some_and(|prev| index <= prev) {
            return Err(Error::BadSparseLine {
                line,
                message: format!("index {index} is not strictly ascending"),
            });
        }
        last = Some(index);
        entries.push((index as usize - 1, parse_finite(val, line)?));
    }
    Ok(Example::new(FeatureVector::sparse(dimension, entries)?, label))
}

/// Loads an svmlight/libsvm file (`label idx:val ...`, 1-based ascending
/// indices). Labels `-1`/`0` map to class 0 and `+1`/`1` to class 1.
pub fn load_svmlight(path: impl AsRef<Path>, dimension: usize) -> Result<Dataset> {
    let path = path.as_ref();
    if dimension == 0 {
        return Err(Error::BadDimension);
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut examples = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let body = strip_comment(&line);
        if body.is_empty() {
            continue;
        }
        examples.push(parse_svm_line(body, i as u64 + 1, dimension)?);
    }
    if examples.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    Dataset::new(dataset_name(path), dimension, examples)
}

/// Largest feature index appearing in an svmlight file.
pub fn infer_svmlight_dimension(path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut max = 0usize;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        for token in strip_comment(&line).split_whitespace().skip(1) {
            let idx = token
                .split_once(':')
                .and_then(|(idx, _)| idx.parse::<usize>().ok())
                .ok_or_else(|| Error::BadSparseLine {
                    line: i as u64 + 1,
                    message: format!("expected index:value, found {token:?}"),
                })?;
            max = max.max(idx);
        }
    }
    if max == 0 {
        return Err(Error::BadDimension);
    }
    Ok(max)
}

/// Writes `+1`/`-1` labels and every stored entry with 1-based indices.
pub fn write_svmlight(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for ex in dataset.examples() {
        let mut line = String::from(if ex.y == Label::One { "+1" } else { "-1" });
        ex.x.for_each_entry(|i, v| {
            if ex.x.is_sparse() || v != 0.0 {
                line.push_str(&format!(" {}:{}", i + 1, v));
            }
        });
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
