//! Empirical-CDF scores with direction detection.
//!
//! Each input variable is scored by the fraction of training values it weakly
//! dominates. Variables negatively correlated with the first input are scored
//! in the descending direction so that all scores point the same way.

use ndarray::{ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::pearson;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ascending,
    Descending,
}

/// Ascending iff Pearson correlation with `anchor` is non-negative. Constant
/// vectors (undefined correlation) are ascending.
///
/// A correlation within summation rounding of zero counts as zero, so the
/// result does not depend on row order.
pub fn detect_direction<T: Scalar>(column: &[T], anchor: &[T]) -> Result<Direction> {
    let r = pearson(column, anchor)?;
    let noise = T::of(4.0) * T::of_usize(column.len()) * T::epsilon();
    Ok(match r {
        Some(r) if r < -noise => Direction::Descending,
        _ => Direction::Ascending,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ScoreFunctionRepr<T> {
    direction: Direction,
    sorted_values: Vec<T>,
}

/// Empirical CDF of one training column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "ScoreFunctionRepr<T>",
    into = "ScoreFunctionRepr<T>",
    bound(
        serialize = "T: Scalar + Serialize",
        deserialize = "T: Scalar + Deserialize<'de>"
    )
)]
pub struct ScoreFunction<T = f64> {
    sorted_values: Vec<T>,
    direction: Direction,
}

impl<T: Scalar> TryFrom<ScoreFunctionRepr<T>> for ScoreFunction<T> {
    type Error = Error;

    fn try_from(r: ScoreFunctionRepr<T>) -> Result<Self> {
        if r.sorted_values.is_empty() {
            return Err(Error::EmptyColumn);
        }
        if r.sorted_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if r.sorted_values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Model("score function values are not sorted".into()));
        }
        Ok(Self {
            sorted_values: r.sorted_values,
            direction: r.direction,
        })
    }
}

impl<T: Scalar> From<ScoreFunction<T>> for ScoreFunctionRepr<T> {
    fn from(f: ScoreFunction<T>) -> Self {
        Self {
            direction: f.direction,
            sorted_values: f.sorted_values,
        }
    }
}

impl<T: Scalar> ScoreFunction<T> {
    pub fn fit(column: &[T], direction: Direction) -> Result<Self> {
        if column.is_empty() {
            return Err(Error::EmptyColumn);
        }
        if column.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let mut sorted_values = column.to_vec();
        sorted_values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        Ok(Self {
            sorted_values,
            direction,
        })
    }

    /// Fraction of training values `<= v` (ascending) or `>= v` (descending).
    pub fn apply(&self, v: T) -> T {
        let n = self.sorted_values.len();
        let count = match self.direction {
            Direction::Ascending => self.sorted_values.partition_point(|&x| x <= v),
            Direction::Descending => n - self.sorted_values.partition_point(|&x| x < v),
        };
        T::of_usize(count) / T::of_usize(n)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn sorted_values(&self) -> &[T] {
        &self.sorted_values
    }

    pub fn n(&self) -> usize {
        self.sorted_values.len()
    }
}

pub fn fit_score<T: Scalar>(column: &[T], direction: Direction) -> Result<ScoreFunction<T>> {
    ScoreFunction::fit(column, direction)
}

pub fn apply_score<T: Scalar>(f: &ScoreFunction<T>, v: T) -> T {
    f.apply(v)
}

/// Training scores of every column together with their score functions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix<T = f64> {
    columns: Vec<Vec<T>>,
    functions: Vec<ScoreFunction<T>>,
}

impl<T: Scalar> ScoreMatrix<T> {
    /// Builds a matrix directly from score columns, with no score functions.
    /// Used where only the weight-learning stage is of interest.
    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(Self {
            columns,
            functions: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &[T] {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    /// Score of training row `j` on variable `i`.
    pub fn get(&self, j: usize, i: usize) -> T {
        self.columns[i][j]
    }

    pub fn functions(&self) -> &[ScoreFunction<T>] {
        &self.functions
    }

    pub fn into_functions(self) -> Vec<ScoreFunction<T>> {
        self.functions
    }
}

/// Fits one score function per column, directions anchored on column 0, and
/// scores the training rows.
pub fn fit_score_matrix<T: Scalar>(inputs: ArrayView2<'_, T>) -> Result<ScoreMatrix<T>> {
    let raw: Vec<Vec<T>> = inputs.axis_iter(Axis(1)).map(|c| c.to_vec()).collect();
    let Some(anchor) = raw.first() else {
        return Err(Error::EmptyDataset("no input columns".into()));
    };
    let mut functions = Vec::with_capacity(raw.len());
    let mut columns = Vec::with_capacity(raw.len());
    for col in &raw {
        let dir = detect_direction(col, anchor)?;
        let f = ScoreFunction::fit(col, dir)?;
        columns.push(col.iter().map(|&v| f.apply(v)).collect());
        functions.push(f);
    }
    Ok(ScoreMatrix { columns, functions })
}
