//! Rank-based evaluation measures.
//!
//! External measures compare the aggregation output with the response:
//! predictive power (Spearman's rho) and similarity (normalized Kendall tau
//! distance). Internal measures compare it with the inputs: consensus (Kemeny
//! distance to the input rankings, averaged over inputs) and the sensitivity
//! ratio (distinct outputs over distinct input rows).

use std::collections::HashSet;

use ndarray::{ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ascending fractional ranks (1-based, ties averaged).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    ranks: Vec<f64>,
}

impl Ranking {
    pub fn from_values<T: Scalar>(values: &[T]) -> Self {
        Self {
            ranks: fractional_ranks(values),
        }
    }

    /// Wraps precomputed ranks. Only their order matters to the distance measures.
    pub fn from_ranks(ranks: Vec<f64>) -> Self {
        Self { ranks }
    }

    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

pub fn fractional_ranks<T: Scalar>(values: &[T]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].as_f64().total_cmp(&values[b].as_f64()));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold 1-based ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation; `None` when either argument is constant.
pub fn pearson<T: Scalar>(a: &[T], b: &[T]) -> Result<Option<T>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Ok(None);
    }
    let nn = T::of_usize(n);
    let ma = a.iter().copied().sum::<T>() / nn;
    let mb = b.iter().copied().sum::<T>() / nn;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= T::zero() || sbb <= T::zero() {
        return Ok(None);
    }
    let r = sab / (saa.sqrt() * sbb.sqrt());
    Ok(Some(r.max(-T::one()).min(T::one())))
}

/// Spearman's rho: Pearson correlation of fractional ranks. NaN when either
/// argument is constant.
pub fn spearman_rho<T: Scalar>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let ra = fractional_ranks(a);
    let rb = fractional_ranks(b);
    Ok(pearson(&ra, &rb)?.unwrap_or(f64::NAN))
}

/// Number of pairs ordered strictly one way by `a` and strictly the other way
/// by `b`. Pairs tied in either ranking never count.
pub fn discordant_pairs(a: &Ranking, b: &Ranking) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| {
        a.ranks[i]
            .total_cmp(&a.ranks[j])
            .then(b.ranks[i].total_cmp(&b.ranks[j]))
    });
    // Ties in `a` are ordered by `b`, so they contribute no strict inversions.
    let mut seq: Vec<f64> = order.iter().map(|&i| b.ranks[i]).collect();
    let mut buf = vec![0.0; seq.len()];
    Ok(count_strict_inversions(&mut seq, &mut buf))
}

fn count_strict_inversions(seq: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (left, right) = seq.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        count_strict_inversions(left, bl) + count_strict_inversions(right, br)
    };
    let (mut i, mut j, mut o) = (0, mid, 0);
    while i < mid && j < n {
        if seq[i] <= seq[j] {
            buf[o] = seq[i];
            i += 1;
        } else {
            buf[o] = seq[j];
            count += (mid - i) as u64;
            j += 1;
        }
        o += 1;
    }
    buf[o..o + mid - i].copy_from_slice(&seq[i..mid]);
    o += mid - i;
    buf[o..o + n - j].copy_from_slice(&seq[j..n]);
    seq.copy_from_slice(&buf[..n]);
    count
}

/// Discordant pairs over all `n(n-1)/2` pairs, in `[0, 1]`.
pub fn kendall_tau_distance(a: &Ranking, b: &Ranking) -> Result<f64> {
    let d = discordant_pairs(a, b)?;
    let n = a.len() as u64;
    if n < 2 {
        return Ok(f64::NAN);
    }
    Ok(d as f64 / (n * (n - 1) / 2) as f64)
}

/// Mean Kendall tau distance between `output` and each input ranking.
pub fn kemeny_distance(output: &Ranking, inputs: &[Ranking]) -> Result<f64> {
    if inputs.is_empty() {
        return Err(Error::InsufficientData("no input rankings".into()));
    }
    let mut total = 0.0;
    for r in inputs {
        total += kendall_tau_distance(output, r)?;
    }
    Ok(total / inputs.len() as f64)
}

/// Distinct output values over distinct input rows, both by exact bit equality.
pub fn sensitivity_ratio<T: Scalar>(outputs: &[T], input_rows: ArrayView2<'_, T>) -> Result<f64> {
    if outputs.len() != input_rows.nrows() {
        return Err(Error::LengthMismatch {
            expected: input_rows.nrows(),
            got: outputs.len(),
        });
    }
    if outputs.is_empty() {
        return Ok(f64::NAN);
    }
    let distinct_outputs: HashSet<u64> = outputs.iter().map(|v| v.bit_key()).collect();
    let distinct_rows: HashSet<Vec<u64>> = input_rows
        .axis_iter(Axis(0))
        .map(|row| row.iter().map(|v| v.bit_key()).collect())
        .collect();
    Ok(distinct_outputs.len() as f64 / distinct_rows.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureFlag {
    /// Fewer than two rows; rank measures are NaN.
    TooFewRows,
    /// Output was constant, so predictive power was recorded as 0.
    ConstantOutput,
    /// Response was constant, so predictive power was recorded as 0.
    ConstantResponse,
    /// No response column; external measures are NaN.
    NoResponse,
}

impl MeasureFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureFlag::TooFewRows => "too_few_rows",
            MeasureFlag::ConstantOutput => "constant_output",
            MeasureFlag::ConstantResponse => "constant_response",
            MeasureFlag::NoResponse => "no_response",
        }
    }
}

// JSON has no NaN; undefined measures are written as null.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    #[serde(with = "nan_as_null")]
    pub predictive_power: f64,
    #[serde(with = "nan_as_null")]
    pub similarity: f64,
    #[serde(with = "nan_as_null")]
    pub consensus: f64,
    #[serde(with = "nan_as_null")]
    pub sensitivity: f64,
    #[serde(default)]
    pub flags: Vec<MeasureFlag>,
}

impl MeasureSet {
    pub fn get(&self, measure: Measure) -> f64 {
        match measure {
            Measure::PredictivePower => self.predictive_power,
            Measure::Similarity => self.similarity,
            Measure::Consensus => self.consensus,
            Measure::Sensitivity => self.sensitivity,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        !self.flags.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    PredictivePower,
    Similarity,
    Consensus,
    Sensitivity,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::PredictivePower,
        Measure::Similarity,
        Measure::Consensus,
        Measure::Sensitivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::PredictivePower => "predictive_power",
            Measure::Similarity => "similarity",
            Measure::Consensus => "consensus",
            Measure::Sensitivity => "sensitivity",
        }
    }

    /// Whether larger values are better.
    pub fn higher_is_better(self) -> bool {
        matches!(self, Measure::PredictivePower | Measure::Sensitivity)
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown measure '{s}'")))
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Computes all four measures for one aggregation output.
pub fn evaluate<T: Scalar>(
    outputs: &[T],
    inputs: ArrayView2<'_, T>,
    response: Option<&[T]>,
) -> Result<MeasureSet> {
    let n = outputs.len();
    if inputs.nrows() != n {
        return Err(Error::LengthMismatch {
            expected: inputs.nrows(),
            got: n,
        });
    }
    let sensitivity = sensitivity_ratio(outputs, inputs)?;
    let mut flags = Vec::new();
    if n < 2 {
        flags.push(MeasureFlag::TooFewRows);
        return Ok(MeasureSet {
            predictive_power: f64::NAN,
            similarity: f64::NAN,
            consensus: f64::NAN,
            sensitivity,
            flags,
        });
    }

    let out_rank = Ranking::from_values(outputs);
    let input_ranks: Vec<Ranking> = inputs
        .axis_iter(Axis(1))
        .map(|c| Ranking::from_values(&c.to_vec()))
        .collect();
    let consensus = kemeny_distance(&out_rank, &input_ranks)?;

    let (predictive_power, similarity) = match response {
        None => {
            flags.push(MeasureFlag::NoResponse);
            (f64::NAN, f64::NAN)
        }
        Some(y) => {
            if y.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: y.len(),
                });
            }
            let y_rank = Ranking::from_values(y);
            let similarity = kendall_tau_distance(&out_rank, &y_rank)?;
            let mut rho = pearson(out_rank.ranks(), y_rank.ranks())?;
            if rho.is_none() {
                if outputs.iter().all(|v| *v == outputs[0]) {
                    flags.push(MeasureFlag::ConstantOutput);
                }
                if y.iter().all(|v| *v == y[0]) {
                    flags.push(MeasureFlag::ConstantResponse);
                }
                rho = Some(0.0);
            }
            (rho.unwrap_or(0.0), similarity)
        }
    };

    Ok(MeasureSet {
        predictive_power,
        similarity,
        consensus,
        sensitivity,
        flags,
    })
}
