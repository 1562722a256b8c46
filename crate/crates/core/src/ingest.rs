//! CSV loading and preprocessing.
//!
//! Loading removes configured identifier columns, non-numeric columns and rows
//! with a missing value in any retained column. [`minmax_scale`] then maps every
//! input column onto `[0, 1]`, dropping constant columns.

use std::fs::File;
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cell contents treated as missing values (after trimming whitespace).
pub const MISSING_MARKERS: [&str; 4] = ["", "NA", "NaN", "?"];

/// Column holding the response, by header name or 0-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResponseColumn {
    Index(usize),
    Name(String),
}

impl std::fmt::Display for ResponseColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResponseColumn::Index(i) => write!(f, "#{i}"),
            ResponseColumn::Name(s) => f.write_str(s),
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_delimiter() -> char {
    ','
}

/// One dataset entry: where the file lives and how to clean it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    #[serde(default, alias = "response")]
    pub response_column: Option<ResponseColumn>,
    #[serde(default, alias = "drop")]
    pub drop_columns: Vec<String>,
    #[serde(default = "default_true")]
    pub has_header: bool,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// Report identifier; defaults to the file stem.
    #[serde(default)]
    pub id: Option<String>,
    /// Optional grouping label, used to compute summaries that exclude a family.
    #[serde(default)]
    pub family: Option<String>,
}

impl DatasetConfig {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            response_column: None,
            drop_columns: Vec::new(),
            has_header: true,
            delimiter: ',',
            id: None,
            family: None,
        }
    }

    pub fn with_response(mut self, column: ResponseColumn) -> Self {
        self.response_column = Some(column);
        self
    }

    pub fn with_drop_columns<I, S>(mut self, columns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.drop_columns = columns.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_delimiter(mut self, delimiter: char) -> Self {
        self.delimiter = delimiter;
        self
    }

    pub fn dataset_id(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.path.display().to_string())
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(ResponseColumn::Name(name)) = &self.response_column {
            if self.drop_columns.iter().any(|d| d == name) {
                return Err(Error::InvalidConfig(format!(
                    "response column '{name}' is also listed in drop_columns"
                )));
            }
        }
        if !self.delimiter.is_ascii() {
            return Err(Error::InvalidConfig(format!(
                "delimiter '{}' is not a single ASCII character",
                self.delimiter
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    Configured,
    NonNumeric,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedColumn {
    pub name: String,
    pub reason: DropReason,
}

/// What preprocessing removed, kept for reporting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// 0-based indices (among data records) of the rows that survived cleaning.
    pub source_rows: Vec<usize>,
    pub rows_read: usize,
    pub rows_removed: usize,
    pub dropped_columns: Vec<DroppedColumn>,
}

/// Clean numeric dataset: `n` rows of `k >= 2` finite inputs and an optional response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T = f64> {
    inputs: Array2<T>,
    response: Option<Vec<T>>,
    column_names: Vec<String>,
    response_name: Option<String>,
    provenance: Provenance,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(
        inputs: Array2<T>,
        response: Option<Vec<T>>,
        column_names: Vec<String>,
    ) -> Result<Self> {
        let (n, k) = inputs.dim();
        if column_names.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                got: column_names.len(),
            });
        }
        if n == 0 || k < 2 {
            return Err(Error::EmptyDataset(format!(
                "need at least one row and two input columns, got n = {n}, k = {k}"
            )));
        }
        if inputs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if let Some(y) = &response {
            if y.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: y.len(),
                });
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput);
            }
        }
        Ok(Self {
            inputs,
            response,
            column_names,
            response_name: None,
            provenance: Provenance {
                source_rows: (0..n).collect(),
                rows_read: n,
                ..Provenance::default()
            },
        })
    }

    /// Builds a dataset from input columns given column-wise, named `x1..xk`.
    pub fn from_columns(columns: &[Vec<T>], response: Option<Vec<T>>) -> Result<Self> {
        let k = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        let inputs = Array2::from_shape_fn((n, k), |(j, i)| columns[i][j]);
        let names = (1..=k).map(|i| format!("x{i}")).collect();
        Self::new(inputs, response, names)
    }

    pub fn with_response_name(mut self, name: Option<String>) -> Self {
        self.response_name = name;
        self
    }

    /// Same inputs, different response. Used to audit that unsupervised fits
    /// never depend on the response.
    pub fn replace_response(&self, response: Option<Vec<T>>) -> Result<Self> {
        let mut d = Self::new(self.inputs.clone(), response, self.column_names.clone())?;
        d.response_name = self.response_name.clone();
        d.provenance = self.provenance.clone();
        Ok(d)
    }

    pub fn inputs(&self) -> ArrayView2<'_, T> {
        self.inputs.view()
    }

    pub fn response(&self) -> Option<&[T]> {
        self.response.as_deref()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn response_name(&self) -> Option<&str> {
        self.response_name.as_deref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn n(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn k(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn column(&self, i: usize) -> Vec<T> {
        self.inputs.column(i).to_vec()
    }
}

fn is_missing(cell: &str) -> bool {
    MISSING_MARKERS.contains(&cell.trim())
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Loads and cleans one CSV file.
pub fn load_csv<T: Scalar>(config: &DatasetConfig) -> Result<Dataset<T>> {
    config.validate()?;
    let file = File::open(&config.path).map_err(|e| Error::io(&config.path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(config.delimiter as u8)
        .has_headers(config.has_header)
        .flexible(false)
        .from_reader(file);

    let csv_err = |e: csv::Error| Error::Parse(format!("{}: {e}", config.path.display()));
    let header: Option<Vec<String>> = if config.has_header {
        Some(
            reader
                .headers()
                .map_err(csv_err)?
                .iter()
                .map(|h| h.trim().to_string())
                .collect(),
        )
    } else {
        None
    };
    let records = reader
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(csv_err)?;

    let width = header
        .as_ref()
        .map(Vec::len)
        .or_else(|| records.first().map(|r| r.len()))
        .unwrap_or(0);
    let names: Vec<String> =
        header.unwrap_or_else(|| (0..width).map(|i| format!("col{i}")).collect());

    let response_idx = match &config.response_column {
        None => None,
        Some(rc) => Some(resolve_column(rc, &names).ok_or_else(|| {
            Error::Parse(format!(
                "{}: response column {rc} not found",
                config.path.display()
            ))
        })?),
    };
    if let Some(r) = response_idx {
        if config.drop_columns.contains(&names[r]) {
            return Err(Error::InvalidConfig(format!(
                "response column '{}' is also listed in drop_columns",
                names[r]
            )));
        }
    }

    let mut dropped = Vec::new();
    for d in &config.drop_columns {
        if !names.contains(d) {
            log::warn!("{}: drop column '{d}' not present", config.path.display());
        }
    }

    let mut input_cols = Vec::new();
    for (c, name) in names.iter().enumerate() {
        if Some(c) == response_idx {
            continue;
        }
        if config.drop_columns.contains(name) {
            dropped.push(DroppedColumn {
                name: name.clone(),
                reason: DropReason::Configured,
            });
            continue;
        }
        if column_is_numeric(&records, c) {
            input_cols.push(c);
        } else {
            log::warn!(
                "{}: dropping non-numeric column '{name}'",
                config.path.display()
            );
            dropped.push(DroppedColumn {
                name: name.clone(),
                reason: DropReason::NonNumeric,
            });
        }
    }

    if let Some(r) = response_idx {
        if !column_is_numeric(&records, r) {
            return Err(Error::Parse(format!(
                "{}: response column '{}' is not numeric",
                config.path.display(),
                names[r]
            )));
        }
    }

    let mut values = Vec::with_capacity(records.len() * input_cols.len());
    let mut response = response_idx.map(|_| Vec::with_capacity(records.len()));
    let mut source_rows = Vec::with_capacity(records.len());
    'rows: for (j, record) in records.iter().enumerate() {
        let mut row = Vec::with_capacity(input_cols.len());
        for &c in &input_cols {
            match record.get(c).and_then(parse_cell) {
                Some(v) => row.push(T::of(v)),
                None => continue 'rows,
            }
        }
        let y = match response_idx {
            Some(r) => match record.get(r).and_then(parse_cell) {
                Some(v) => Some(T::of(v)),
                None => continue 'rows,
            },
            None => None,
        };
        values.extend(row);
        if let (Some(ys), Some(y)) = (response.as_mut(), y) {
            ys.push(y);
        }
        source_rows.push(j);
    }

    let n = source_rows.len();
    let k = input_cols.len();
    if n == 0 || k < 2 {
        return Err(Error::EmptyDataset(format!(
            "{}: {n} complete rows and {k} numeric input columns after cleaning",
            config.path.display()
        )));
    }
    let rows_removed = records.len() - n;
    if rows_removed > 0 {
        log::info!(
            "{}: removed {rows_removed} rows with missing values",
            config.path.display()
        );
    }
    let inputs = Array2::from_shape_vec((n, k), values)
        .map_err(|e| Error::Parse(format!("internal shape error: {e}")))?;
    let column_names = input_cols.iter().map(|&c| names[c].clone()).collect();
    let mut dataset = Dataset::new(inputs, response, column_names)?;
    dataset.response_name = response_idx.map(|r| names[r].clone());
    dataset.provenance = Provenance {
        source_rows,
        rows_read: records.len(),
        rows_removed,
        dropped_columns: dropped,
    };
    Ok(dataset)
}

fn resolve_column(rc: &ResponseColumn, names: &[String]) -> Option<usize> {
    match rc {
        ResponseColumn::Index(i) => (*i < names.len()).then_some(*i),
        ResponseColumn::Name(s) => names.iter().position(|n| n == s).or_else(|| {
            // bare integers address headerless files
            s.parse::<usize>().ok().filter(|&i| i < names.len())
        }),
    }
}

/// A column is numeric iff it has at least one non-missing cell and every
/// non-missing cell parses as a finite real.
fn column_is_numeric(records: &[csv::StringRecord], c: usize) -> bool {
    let mut seen = false;
    for record in records {
        let cell = record.get(c).unwrap_or("");
        if is_missing(cell) {
            continue;
        }
        if parse_cell(cell).is_none() {
            return false;
        }
        seen = true;
    }
    seen
}

/// Per-column min-max map fitted on one dataset and replayable on others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler<T = f64> {
    /// Input column names the scaler was fitted on, before constant columns were dropped.
    pub source_columns: Vec<String>,
    /// Indices into `source_columns` that survive scaling.
    pub kept: Vec<usize>,
    pub min: Vec<T>,
    pub max: Vec<T>,
}

impl<T: Scalar> MinMaxScaler<T> {
    pub fn fit(d: &Dataset<T>) -> Self {
        let mut kept = Vec::new();
        let mut min = Vec::new();
        let mut max = Vec::new();
        for (i, col) in d.inputs.axis_iter(Axis(1)).enumerate() {
            let lo = col.iter().copied().fold(T::infinity(), T::min);
            let hi = col.iter().copied().fold(T::neg_infinity(), T::max);
            if hi > lo {
                kept.push(i);
                min.push(lo);
                max.push(hi);
            }
        }
        Self {
            source_columns: d.column_names.clone(),
            kept,
            min,
            max,
        }
    }

    /// Columns in the output of [`apply`](Self::apply).
    pub fn output_columns(&self) -> Vec<String> {
        self.kept
            .iter()
            .map(|&i| self.source_columns[i].clone())
            .collect()
    }

    pub fn apply(&self, d: &Dataset<T>) -> Result<Dataset<T>> {
        if d.k() != self.source_columns.len() {
            return Err(Error::ArityMismatch {
                expected: self.source_columns.len(),
                got: d.k(),
            });
        }
        if self.kept.len() < 2 {
            return Err(Error::EmptyDataset(format!(
                "only {} non-constant input columns",
                self.kept.len()
            )));
        }
        let n = d.n();
        let inputs = Array2::from_shape_fn((n, self.kept.len()), |(j, c)| {
            let v = d.inputs[[j, self.kept[c]]];
            (v - self.min[c]) / (self.max[c] - self.min[c])
        });
        let mut provenance = d.provenance.clone();
        for (i, name) in self.source_columns.iter().enumerate() {
            if !self.kept.contains(&i) {
                provenance.dropped_columns.push(DroppedColumn {
                    name: name.clone(),
                    reason: DropReason::Constant,
                });
            }
        }
        Ok(Dataset {
            inputs,
            response: d.response.clone(),
            column_names: self.output_columns(),
            response_name: d.response_name.clone(),
            provenance,
        })
    }
}

/// Scales every input column to `[0, 1]`; constant columns are dropped with a warning.
pub fn minmax_scale<T: Scalar>(d: &Dataset<T>) -> Result<Dataset<T>> {
    let scaler = MinMaxScaler::fit(d);
    for (i, name) in d.column_names.iter().enumerate() {
        if !scaler.kept.contains(&i) {
            log::warn!("dropping constant input column '{name}'");
        }
    }
    scaler.apply(d)
}

/// Resolves a possibly relative path against a base directory.
pub(crate) fn resolve_path(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
