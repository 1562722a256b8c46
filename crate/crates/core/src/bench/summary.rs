use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::report::EvaluationReport;
use crate::aggregate::ApproachKind;
use crate::error::{Error, Result};
use crate::metrics::{pearson, Measure};

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        len => {
            let h = (len - 1) as f64 * p.clamp(0.0, 1.0);
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(len - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub count: usize,
}

impl Quartiles {
    pub fn from_values(values: &[f64]) -> Self {
        let s = sorted(values);
        Self {
            p25: quantile(&s, 0.25),
            median: quantile(&s, 0.5),
            p75: quantile(&s, 0.75),
            count: s.len(),
        }
    }
}

/// Box-plot statistics with Tukey whiskers (most extreme values within 1.5 IQR).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxPlot {
    pub count: usize,
    pub whisker_low: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxPlot {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let s = sorted(values);
        let q = Quartiles::from_values(&s);
        let iqr = q.p75 - q.p25;
        let (lo_fence, hi_fence) = (q.p25 - 1.5 * iqr, q.p75 + 1.5 * iqr);
        let inside: Vec<f64> = s
            .iter()
            .copied()
            .filter(|v| *v >= lo_fence && *v <= hi_fence)
            .collect();
        Some(Self {
            count: s.len(),
            whisker_low: inside.first().copied().unwrap_or(q.p25),
            p25: q.p25,
            median: q.median,
            p75: q.p75,
            whisker_high: inside.last().copied().unwrap_or(q.p75),
            outliers: s
                .into_iter()
                .filter(|v| *v < lo_fence || *v > hi_fence)
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub approach: ApproachKind,
    pub measure: Measure,
    pub all: Quartiles,
    /// Quartiles without the excluded family, when one was named.
    pub filtered: Option<Quartiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub approaches: Vec<ApproachKind>,
    pub excluded_family: Option<String>,
    /// Per measure, the datasets on which every approach has a finite value.
    pub complete_datasets: Vec<(Measure, Vec<String>)>,
    pub rows: Vec<SummaryRow>,
}

/// Quartiles of every measure per approach, over the datasets where every
/// approach produced a finite value, optionally also without one family.
pub fn summarize(report: &EvaluationReport, exclude_family: Option<&str>) -> Result<SummaryTable> {
    if !report.cells.iter().any(|c| c.measures.is_some()) {
        return Err(Error::EmptyReport);
    }
    let datasets = report.evaluated_datasets();
    let mut complete_datasets = Vec::new();
    let mut rows = Vec::new();
    for measure in Measure::ALL {
        let complete: Vec<String> = datasets
            .iter()
            .filter(|d| {
                report.approaches.iter().all(|&a| {
                    report
                        .cell(d, a)
                        .and_then(|c| c.value(measure))
                        .is_some()
                })
            })
            .map(|d| d.to_string())
            .collect();
        complete_datasets.push((measure, complete));
    }
    for &approach in &report.approaches {
        for (measure, complete) in &complete_datasets {
            let values_over = |ids: &mut dyn Iterator<Item = &String>| -> Vec<f64> {
                ids.filter_map(|d| report.cell(d, approach).and_then(|c| c.value(*measure)))
                    .collect()
            };
            let all = Quartiles::from_values(&values_over(&mut complete.iter()));
            let filtered = exclude_family.map(|fam| {
                Quartiles::from_values(&values_over(
                    &mut complete.iter().filter(|d| report.family_of(d) != Some(fam)),
                ))
            });
            rows.push(SummaryRow {
                approach,
                measure: *measure,
                all,
                filtered,
            });
        }
    }
    Ok(SummaryTable {
        approaches: report.approaches.clone(),
        excluded_family: exclude_family.map(str::to_string),
        complete_datasets,
        rows,
    })
}

fn fmt_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

impl SummaryTable {
    pub fn row(&self, approach: ApproachKind, measure: Measure) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.approach == approach && r.measure == measure)
    }

    /// Values of one approach over the complete dataset set for `measure`.
    pub fn values_for(
        &self,
        report: &EvaluationReport,
        approach: ApproachKind,
        measure: Measure,
    ) -> Vec<f64> {
        self.complete_datasets
            .iter()
            .find(|(m, _)| *m == measure)
            .map(|(_, ids)| {
                ids.iter()
                    .filter_map(|d| report.cell(d, approach).and_then(|c| c.value(measure)))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let err = |e: csv::Error| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        };
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        let mut header = vec!["approach", "measure", "p25", "median", "p75", "datasets"];
        if self.excluded_family.is_some() {
            header.extend(["p25_excluded", "median_excluded", "p75_excluded", "datasets_excluded"]);
        }
        w.write_record(&header).map_err(err)?;
        for r in &self.rows {
            let mut rec = vec![
                r.approach.to_string(),
                r.measure.to_string(),
                fmt_cell(r.all.p25),
                fmt_cell(r.all.median),
                fmt_cell(r.all.p75),
                r.all.count.to_string(),
            ];
            if self.excluded_family.is_some() {
                let f = r.filtered.unwrap_or(Quartiles {
                    p25: f64::NAN,
                    median: f64::NAN,
                    p75: f64::NAN,
                    count: 0,
                });
                rec.extend([
                    fmt_cell(f.p25),
                    fmt_cell(f.median),
                    fmt_cell(f.p75),
                    f.count.to_string(),
                ]);
            }
            w.write_record(&rec).map_err(err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Median table for terminal output; excluded-family medians in parentheses.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<6}", "");
        for m in Measure::ALL {
            let _ = write!(out, " {:>22}", m.name());
        }
        out.push('\n');
        for &a in &self.approaches {
            let _ = write!(out, "{:<6}", a.name());
            for m in Measure::ALL {
                let cell = match self.row(a, m) {
                    Some(r) => match r.filtered {
                        Some(f) => format!("{:.2} ({:.2})", r.all.median, f.median),
                        None => format!("{:.2}", r.all.median),
                    },
                    None => "-".to_string(),
                };
                let _ = write!(out, " {cell:>22}");
            }
            out.push('\n');
        }
        out
    }
}

/// Pearson correlations between approaches of their per-dataset values of one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub measure: Measure,
    pub approaches: Vec<ApproachKind>,
    /// Row-major `a x a`; NaN where a vector is constant over the shared datasets.
    pub values: Vec<Vec<f64>>,
    /// Datasets shared by each pair.
    pub counts: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: ApproachKind, b: ApproachKind) -> Option<f64> {
        let i = self.approaches.iter().position(|&x| x == a)?;
        let j = self.approaches.iter().position(|&x| x == b)?;
        Some(self.values[i][j])
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let err = |e: csv::Error| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        };
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        let mut header = vec![String::from("approach")];
        header.extend(self.approaches.iter().map(ToString::to_string));
        w.write_record(&header).map_err(err)?;
        for (a, row) in self.approaches.iter().zip(&self.values) {
            let mut rec = vec![a.to_string()];
            rec.extend(row.iter().map(|&v| fmt_cell(v)));
            w.write_record(&rec).map_err(err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Pairwise-complete correlation matrix of one measure across datasets.
pub fn correlation_matrix(report: &EvaluationReport, measure: Measure) -> Result<CorrelationMatrix> {
    let approaches = report.approaches.clone();
    if approaches.len() < 2 {
        return Err(Error::InsufficientData("need at least two approaches".into()));
    }
    let datasets = report.evaluated_datasets();
    let complete = datasets
        .iter()
        .filter(|d| {
            approaches
                .iter()
                .all(|&a| report.cell(d, a).and_then(|c| c.value(measure)).is_some())
        })
        .count();
    if complete < 3 {
        return Err(Error::InsufficientData(format!(
            "{complete} datasets with complete {} values, need 3",
            measure.name()
        )));
    }
    let a = approaches.len();
    let mut values = vec![vec![f64::NAN; a]; a];
    let mut counts = vec![vec![0; a]; a];
    for i in 0..a {
        for j in i..a {
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for d in &datasets {
                let x = report.cell(d, approaches[i]).and_then(|c| c.value(measure));
                let y = report.cell(d, approaches[j]).and_then(|c| c.value(measure));
                if let (Some(x), Some(y)) = (x, y) {
                    xs.push(x);
                    ys.push(y);
                }
            }
            let r = if i == j {
                1.0
            } else {
                pearson(&xs, &ys)?.unwrap_or(f64::NAN)
            };
            values[i][j] = r;
            values[j][i] = r;
            counts[i][j] = xs.len();
            counts[j][i] = xs.len();
        }
    }
    Ok(CorrelationMatrix {
        measure,
        approaches,
        values,
        counts,
    })
}
