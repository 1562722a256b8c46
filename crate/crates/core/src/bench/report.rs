use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::summary::{correlation_matrix, summarize, BoxPlot, SummaryTable};
use crate::aggregate::ApproachKind;
use crate::error::{Error, Result};
use crate::ingest::DroppedColumn;
use crate::metrics::{Measure, MeasureSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DatasetStatus {
    Loaded {
        n: usize,
        k: usize,
        rows_removed: usize,
        dropped_columns: Vec<DroppedColumn>,
        columns: Vec<String>,
        distinct_response_values: Option<usize>,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub family: Option<String>,
    pub path: String,
    pub status: DatasetStatus,
}

/// Result of one approach on one dataset: measures, or the failure message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub dataset: String,
    pub approach: ApproachKind,
    pub n: usize,
    pub k: usize,
    pub distinct_outputs: Option<usize>,
    pub weights: Option<Vec<f64>>,
    pub measures: Option<MeasureSet>,
    pub error: Option<String>,
}

impl Cell {
    pub(super) fn with_dataset(mut self, id: &str) -> Self {
        self.dataset = id.to_string();
        self
    }

    /// Finite value of `measure`, if the cell was evaluated.
    pub fn value(&self, measure: Measure) -> Option<f64> {
        self.measures
            .as_ref()
            .map(|m| m.get(measure))
            .filter(|v| v.is_finite())
    }

    fn flags_field(&self) -> String {
        match (&self.measures, &self.error) {
            (_, Some(_)) => "failed".to_string(),
            (Some(m), None) => m
                .flags
                .iter()
                .map(|f| f.as_str())
                .collect::<Vec<_>>()
                .join(";"),
            (None, None) => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub approaches: Vec<ApproachKind>,
    pub datasets: Vec<DatasetRecord>,
    pub cells: Vec<Cell>,
    pub warnings: Vec<String>,
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    }
}

impl EvaluationReport {
    pub fn cell(&self, dataset: &str, approach: ApproachKind) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.dataset == dataset && c.approach == approach)
    }

    pub fn family_of(&self, dataset: &str) -> Option<&str> {
        self.datasets
            .iter()
            .find(|d| d.id == dataset)
            .and_then(|d| d.family.as_deref())
    }

    /// Ids of datasets with at least one cell, in report order.
    pub fn evaluated_datasets(&self) -> Vec<&str> {
        self.datasets
            .iter()
            .filter(|d| matches!(d.status, DatasetStatus::Loaded { .. }))
            .map(|d| d.id.as_str())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
        w.write_record([
            "dataset",
            "approach",
            "n",
            "k",
            "predictive_power",
            "similarity",
            "consensus",
            "sensitivity",
            "flags",
        ])
        .map_err(csv_error(path))?;
        for c in &self.cells {
            let m = |f: fn(&MeasureSet) -> f64| {
                c.measures.as_ref().map(|s| fmt_f64(f(s))).unwrap_or_default()
            };
            w.write_record([
                c.dataset.clone(),
                c.approach.to_string(),
                c.n.to_string(),
                c.k.to_string(),
                m(|s| s.predictive_power),
                m(|s| s.similarity),
                m(|s| s.consensus),
                m(|s| s.sensitivity),
                c.flags_field(),
            ])
            .map_err(csv_error(path))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Writes every report artifact into `dir` and returns the paths written.
    ///
    /// Correlation matrices need at least three fully evaluated datasets; when
    /// they cannot be computed a warning is logged and the file is skipped.
    pub fn write_artifacts(&self, dir: &Path, exclude_family: Option<&str>) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();

        let path = dir.join("report.csv");
        self.write_csv(&path)?;
        written.push(path);

        let path = dir.join("report.json");
        let mut json = self.to_json()?;
        json.push('\n');
        fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
        written.push(path);

        let summary = summarize(self, exclude_family)?;
        let path = dir.join("summary.csv");
        summary.write_csv(&path)?;
        written.push(path);

        for measure in Measure::ALL {
            match correlation_matrix(self, measure) {
                Ok(m) => {
                    let path = dir.join(format!("corr_{}.csv", measure.name()));
                    m.write_csv(&path)?;
                    written.push(path);
                }
                Err(e) => log::warn!("skipping corr_{}.csv: {e}", measure.name()),
            }
            let path = dir.join(format!("boxplot_{}.csv", measure.name()));
            write_boxplots(self, &summary, measure, &path)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn write_boxplots(
    report: &EvaluationReport,
    summary: &SummaryTable,
    measure: Measure,
    path: &Path,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
    w.write_record([
        "approach",
        "count",
        "whisker_low",
        "p25",
        "median",
        "p75",
        "whisker_high",
        "outliers",
    ])
    .map_err(csv_error(path))?;
    for &approach in &report.approaches {
        let values = summary.values_for(report, approach, measure);
        let Some(b) = BoxPlot::from_values(&values) else {
            continue;
        };
        let outliers = b
            .outliers
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            approach.to_string(),
            b.count.to_string(),
            fmt_f64(b.whisker_low),
            fmt_f64(b.p25),
            fmt_f64(b.median),
            fmt_f64(b.p75),
            fmt_f64(b.whisker_high),
            outliers,
        ])
        .map_err(csv_error(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
