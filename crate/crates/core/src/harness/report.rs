use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::Algorithm;
use crate::error::{Error, Result};

/// Accuracies of one algorithm on one task across repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub task: String,
    pub algorithm: Algorithm,
    /// Held-out target accuracy per repetition, as a fraction.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of `accuracies`.
    pub std: f64,
    /// Training plus evaluation wall-clock per repetition, in seconds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seconds: Vec<f64>,
}

impl ResultRow {
    pub fn new(task: impl Into<String>, algorithm: Algorithm, accuracies: Vec<f64>, seconds: Vec<f64>) -> Self {
        let (mean, std) = mean_std(&accuracies);
        Self {
            task: task.into(),
            algorithm,
            accuracies,
            mean,
            std,
            seconds,
        }
    }

    /// `mean% ± std` with two decimals, e.g. `76.00±0.01`.
    pub fn cell(&self) -> String {
        format_cell(self.mean, self.std)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, task: &str, algorithm: Algorithm) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.task == task && r.algorithm == algorithm)
    }

    /// First row for `algorithm`, whatever the task.
    pub fn by_algorithm(&self, algorithm: Algorithm) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn without_timings(&self) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| ResultRow {
                    seconds: Vec::new(),
                    ..r.clone()
                })
                .collect(),
        }
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean as a percentage and the standard deviation as-is, two decimals each.
pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{:.2}±{:.2}", mean * 100.0, std)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" | "text" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::BadConfig(format!("unknown report format `{other}`"))),
        }
    }
}

fn render_table(table: &ResultTable, timings: bool) -> String {
    let mut tasks: Vec<&str> = Vec::new();
    let mut algos: Vec<Algorithm> = Vec::new();
    for r in &table.rows {
        if !tasks.contains(&r.task.as_str()) {
            tasks.push(&r.task);
        }
        if !algos.contains(&r.algorithm) {
            algos.push(r.algorithm);
        }
    }
    let mut header = vec!["task".to_string()];
    header.extend(algos.iter().map(|a| a.to_string()));
    let mut lines = vec![header];
    for task in &tasks {
        let mut line = vec![task.to_string()];
        for &algo in &algos {
            line.push(match table.row(task, algo) {
                Some(r) if timings && !r.seconds.is_empty() => {
                    let (secs, _) = mean_std(&r.seconds);
                    format!("{} ({secs:.3}s)", r.cell())
                }
                Some(r) => r.cell(),
                None => "-".to_string(),
            });
        }
        lines.push(line);
    }
    let columns = lines[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| lines.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, line) in lines.iter().enumerate() {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            let _ = writeln!(out, "{}", rule.join("-+-"));
        }
    }
    out
}

fn render_csv(table: &ResultTable, timings: bool) -> Result<String> {
    let reps = table.rows.iter().map(|r| r.accuracies.len()).max().unwrap_or(0);
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["task".to_string(), "algorithm".into(), "mean".into(), "std".into()];
    header.extend((0..reps).map(|i| format!("acc_{i}")));
    if timings {
        header.extend((0..reps).map(|i| format!("seconds_{i}")));
    }
    let csv_err = |e: csv::Error| Error::BadConfig(format!("csv: {e}"));
    writer.write_record(&header).map_err(csv_err)?;
    for r in &table.rows {
        let mut record = vec![
            r.task.clone(),
            r.algorithm.to_string(),
            r.mean.to_string(),
            r.std.to_string(),
        ];
        record.extend((0..reps).map(|i| r.accuracies.get(i).map(f64::to_string).unwrap_or_default()));
        if timings {
            record.extend((0..reps).map(|i| r.seconds.get(i).map(f64::to_string).unwrap_or_default()));
        }
        writer.write_record(&record).map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::BadConfig(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Renders `table`. Wall-clock timings vary between runs and are only
/// included when `timings` is set.
pub fn render_report(table: &ResultTable, format: ReportFormat, timings: bool) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let stripped;
    let table = if timings {
        table
    } else {
        stripped = table.without_timings();
        &stripped
    };
    match format {
        ReportFormat::Table => Ok(render_table(table, timings)),
        ReportFormat::Csv => render_csv(table, timings),
        ReportFormat::Json => Ok(serde_json::to_string_pretty(table)? + "\n"),
    }
}

pub fn emit_report(table: &ResultTable, format: ReportFormat, path: impl AsRef<Path>, timings: bool) -> Result<()> {
    let text = render_report(table, format, timings)?;
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn parse_json_report(text: &str) -> Result<ResultTable> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        ResultTable {
            rows: vec![
                ResultRow::new("b->d", Algorithm::OtBag, vec![0.7, 0.8, 0.75], vec![0.1, 0.2, 0.3]),
                ResultRow::new("b->d", Algorithm::Jdsmv, vec![0.9, 0.95, 0.85], vec![0.1, 0.1, 0.1]),
            ],
        }
    }

    #[test]
    fn cell_format() {
        assert_eq!(format_cell(0.76003, 0.0141), "76.00±0.01");
        assert_eq!(format_cell(0.4733, 0.23), "47.33±0.23");
    }

    #[test]
    fn mean_std_population() {
        let (m, s) = mean_std(&[0.0, 2.0]);
        assert_eq!(m, 1.0);
        assert_eq!(s, 1.0);
        assert_eq!(mean_std(&[0.3]).1, 0.0);
    }

    #[test]
    fn json_round_trip() {
        let t = table();
        let text = render_report(&t, ReportFormat::Json, true).unwrap();
        assert_eq!(parse_json_report(&text).unwrap(), t);
        let text = render_report(&t, ReportFormat::Json, false).unwrap();
        assert_eq!(parse_json_report(&text).unwrap(), t.without_timings());
    }

    #[test]
    fn text_and_csv() {
        let t = table();
        let text = render_report(&t, ReportFormat::Table, false).unwrap();
        assert!(text.contains("75.00±0.04"), "{text}");
        assert!(text.lines().next().unwrap().contains("jdsmv"));
        let csv = render_report(&t, ReportFormat::Csv, false).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("task,algorithm,mean,std,acc_0,acc_1,acc_2"));
        assert!(lines.next().unwrap().starts_with("b->d,otbag,0.75"));
        let with_time = render_report(&t, ReportFormat::Csv, true).unwrap();
        assert!(with_time.lines().next().unwrap().ends_with("seconds_2"));
    }

    #[test]
    fn empty_and_unwritable() {
        assert!(matches!(
            render_report(&ResultTable::default(), ReportFormat::Table, false),
            Err(Error::EmptyTable)
        ));
        let err = emit_report(&table(), ReportFormat::Json, "/nonexistent/dir/out.json", false).unwrap_err();
        assert_eq!(err.name(), "IoError");
    }
}
