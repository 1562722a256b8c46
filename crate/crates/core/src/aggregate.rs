//! The seven aggregation approaches behind one fit/predict contract.

use std::sync::atomic::{AtomicBool, Ordering};

use ndarray::{ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::scalar::Scalar;
use crate::scoring::{fit_score_matrix, ScoreFunction};
use crate::solver::{solve_simplex_ls, SimplexLsProblem};
use crate::weights::{learn_weights, DominanceConfig, WeightVector};

static WARNED_OUT_OF_RANGE: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ApproachKind {
    #[serde(alias = "prod")]
    Prod,
    #[serde(alias = "min")]
    Min,
    #[serde(alias = "max")]
    Max,
    #[serde(alias = "sum")]
    Sum,
    #[serde(alias = "wpm")]
    Wpm,
    #[serde(alias = "wsm")]
    Wsm,
    #[serde(alias = "reg")]
    Reg,
}

impl ApproachKind {
    pub const ALL: [ApproachKind; 7] = [
        ApproachKind::Prod,
        ApproachKind::Min,
        ApproachKind::Max,
        ApproachKind::Sum,
        ApproachKind::Wpm,
        ApproachKind::Wsm,
        ApproachKind::Reg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ApproachKind::Prod => "PROD",
            ApproachKind::Min => "MIN",
            ApproachKind::Max => "MAX",
            ApproachKind::Sum => "SUM",
            ApproachKind::Wpm => "WPM",
            ApproachKind::Wsm => "WSM",
            ApproachKind::Reg => "REG",
        }
    }

    pub fn is_basic(self) -> bool {
        matches!(
            self,
            ApproachKind::Prod | ApproachKind::Min | ApproachKind::Max | ApproachKind::Sum
        )
    }

    pub fn is_supervised(self) -> bool {
        self == ApproachKind::Reg
    }

    /// Parses a comma-separated list such as `wpm,wsm,reg`.
    pub fn parse_list(s: &str) -> Result<Vec<ApproachKind>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let kind = part.parse()?;
            if !out.contains(&kind) {
                out.push(kind);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidConfig("empty approach list".into()));
        }
        Ok(out)
    }
}

impl std::fmt::Display for ApproachKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ApproachKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        ApproachKind::ALL
            .into_iter()
            .find(|k| k.name() == upper)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown approach '{s}'")))
    }
}

/// Learned parameters of a model, by family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub enum ModelParams<T> {
    Basic,
    Scored {
        score_functions: Vec<ScoreFunction<T>>,
        weights: WeightVector<T>,
    },
    Regression {
        weights: Vec<T>,
        /// Training objective, when the model was fitted rather than assembled.
        #[serde(default)]
        objective: Option<T>,
        iterations: usize,
        converged: bool,
    },
}

/// Settings shared by the learned approaches.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub dominance: DominanceConfig,
    pub solver_tolerance: f64,
    pub solver_max_iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            dominance: DominanceConfig::default(),
            solver_tolerance: 1e-9,
            solver_max_iterations: 50_000,
        }
    }
}

/// A fitted, immutable aggregation function of `k` inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct AggregationModel<T = f64> {
    kind: ApproachKind,
    k: usize,
    params: ModelParams<T>,
}

impl<T: Scalar> AggregationModel<T> {
    pub fn basic(kind: ApproachKind, k: usize) -> Result<Self> {
        if !kind.is_basic() {
            return Err(Error::InvalidConfig(format!("{kind} is not a basic function")));
        }
        Ok(Self {
            kind,
            k,
            params: ModelParams::Basic,
        })
    }

    /// Assembles a scored model from parts.
    pub fn scored(
        kind: ApproachKind,
        score_functions: Vec<ScoreFunction<T>>,
        weights: WeightVector<T>,
    ) -> Result<Self> {
        let m = Self {
            kind,
            k: score_functions.len(),
            params: ModelParams::Scored {
                score_functions,
                weights,
            },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn regression(weights: Vec<T>) -> Result<Self> {
        let m = Self {
            kind: ApproachKind::Reg,
            k: weights.len(),
            params: ModelParams::Regression {
                weights,
                objective: None,
                iterations: 0,
                converged: true,
            },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn kind(&self) -> ApproachKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    /// Aggregation weights, for the learned approaches.
    pub fn weights(&self) -> Option<&[T]> {
        match &self.params {
            ModelParams::Basic => None,
            ModelParams::Scored { weights, .. } => Some(weights.weights()),
            ModelParams::Regression { weights, .. } => Some(weights),
        }
    }

    pub fn score_functions(&self) -> Option<&[ScoreFunction<T>]> {
        match &self.params {
            ModelParams::Scored {
                score_functions, ..
            } => Some(score_functions),
            _ => None,
        }
    }

    /// Checks internal consistency, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Model(format!("arity {} below 2", self.k)));
        }
        match (&self.params, self.kind) {
            (ModelParams::Basic, kind) if kind.is_basic() => Ok(()),
            (
                ModelParams::Scored {
                    score_functions,
                    weights,
                },
                ApproachKind::Wsm | ApproachKind::Wpm,
            ) => {
                if score_functions.len() != self.k || weights.k() != self.k {
                    return Err(Error::Model("score function or weight count differs from k".into()));
                }
                weights.validate()
            }
            (ModelParams::Regression { weights, .. }, ApproachKind::Reg) => {
                if weights.len() != self.k {
                    return Err(Error::Model("weight count differs from k".into()));
                }
                let tol = T::of(1e-9).max(T::epsilon() * T::of(64.0));
                let sum: T = weights.iter().copied().sum();
                if weights.iter().any(|w| !w.is_finite() || *w < T::zero())
                    || (sum - T::one()).abs() > tol
                {
                    return Err(Error::Model("regression weights are not on the simplex".into()));
                }
                Ok(())
            }
            (_, kind) => Err(Error::Model(format!("parameters do not match kind {kind}"))),
        }
    }

    pub fn predict(&self, row: &[T]) -> Result<T> {
        if row.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                got: row.len(),
            });
        }
        Ok(self.predict_unchecked(row))
    }

    fn predict_unchecked(&self, row: &[T]) -> T {
        match &self.params {
            ModelParams::Basic => {
                if row.iter().any(|&v| v < T::zero() || v > T::one())
                    && !WARNED_OUT_OF_RANGE.swap(true, Ordering::Relaxed)
                {
                    log::warn!("basic aggregation applied to values outside [0, 1]");
                }
                match self.kind {
                    ApproachKind::Prod => row.iter().copied().fold(T::one(), |a, b| a * b),
                    ApproachKind::Min => row.iter().copied().fold(T::infinity(), T::min),
                    ApproachKind::Max => row.iter().copied().fold(T::neg_infinity(), T::max),
                    _ => row.iter().copied().sum(),
                }
            }
            ModelParams::Regression { weights, .. } => {
                row.iter().zip(weights).map(|(&x, &w)| w * x).sum()
            }
            ModelParams::Scored {
                score_functions,
                weights,
            } => {
                let scores = score_functions.iter().zip(row).map(|(f, &v)| (f, f.apply(v)));
                let w = weights.weights();
                if self.kind == ApproachKind::Wsm {
                    scores.zip(w).map(|((_, s), &wi)| wi * s).sum()
                } else {
                    // log space; unseen values can score 0, so clamp to 1/(2n)
                    scores
                        .zip(w)
                        .map(|((f, s), &wi)| {
                            let floor = T::one() / T::of_usize(2 * f.n());
                            wi * s.max(floor).ln()
                        })
                        .sum::<T>()
                        .exp()
                }
            }
        }
    }

    pub fn predict_all(&self, inputs: ArrayView2<'_, T>) -> Result<Vec<T>> {
        if inputs.ncols() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                got: inputs.ncols(),
            });
        }
        let mut row = vec![T::zero(); self.k];
        Ok(inputs
            .axis_iter(Axis(0))
            .map(|r| {
                row.iter_mut().zip(r.iter()).for_each(|(d, &s)| *d = s);
                self.predict_unchecked(&row)
            })
            .collect())
    }
}

/// Fits any approach without access to a response. `REG` fails with
/// [`Error::MissingResponse`].
pub fn fit_unsupervised<T: Scalar>(
    kind: ApproachKind,
    inputs: ArrayView2<'_, T>,
    config: &FitConfig,
) -> Result<AggregationModel<T>> {
    let k = inputs.ncols();
    if k < 2 {
        return Err(Error::EmptyDataset(format!("k = {k}, need at least 2 inputs")));
    }
    match kind {
        ApproachKind::Reg => Err(Error::MissingResponse),
        kind if kind.is_basic() => AggregationModel::basic(kind, k),
        kind => {
            if inputs.nrows() == 0 {
                return Err(Error::EmptyColumn);
            }
            let scores = fit_score_matrix(inputs)?;
            let weights = learn_weights(&scores, &config.dominance);
            AggregationModel::scored(kind, scores.into_functions(), weights)
        }
    }
}

/// Fits `kind` on a dataset. Only `REG` reads the response.
pub fn fit<T: Scalar>(
    kind: ApproachKind,
    d: &Dataset<T>,
    config: &FitConfig,
) -> Result<AggregationModel<T>> {
    if kind != ApproachKind::Reg {
        return fit_unsupervised(kind, d.inputs(), config);
    }
    let y = d.response().ok_or(Error::MissingResponse)?;
    let problem = SimplexLsProblem::new(d.inputs().to_owned(), y.to_vec())
        .with_tolerance(T::of(config.solver_tolerance))
        .with_max_iterations(config.solver_max_iterations);
    let sol = solve_simplex_ls(&problem)?;
    let model = AggregationModel {
        kind,
        k: d.k(),
        params: ModelParams::Regression {
            weights: sol.weights,
            objective: Some(sol.objective),
            iterations: sol.iterations,
            converged: sol.converged,
        },
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::Direction;
    use ndarray::array;

    fn basic(kind: ApproachKind, k: usize) -> AggregationModel<f64> {
        AggregationModel::basic(kind, k).unwrap()
    }

    #[test]
    fn basic_examples() {
        assert_eq!(basic(ApproachKind::Prod, 3).predict(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(basic(ApproachKind::Min, 3).predict(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        let s = basic(ApproachKind::Sum, 3).predict(&[0.2, 0.5, 0.9]).unwrap();
        assert!((s - 1.6).abs() < 1e-15);
        assert_eq!(basic(ApproachKind::Max, 2).predict(&[0.3, 0.7]).unwrap(), 0.7);
    }

    #[test]
    fn wpm_example() {
        // scores 0.25 and 1 under equal weights -> sqrt(0.25) = 0.5
        let f0 = ScoreFunction::<f64>::fit(&[0.1, 0.2, 0.3, 0.4], Direction::Ascending).unwrap();
        let f1 = ScoreFunction::fit(&[0.1, 0.2, 0.3, 0.4], Direction::Ascending).unwrap();
        let m = AggregationModel::scored(ApproachKind::Wpm, vec![f0, f1], WeightVector::uniform(2))
            .unwrap();
        let v = m.predict(&[0.1, 0.4]).unwrap();
        assert!((v - 0.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn wpm_clamps_unseen_low_values() {
        let f = ScoreFunction::<f64>::fit(&[0.2, 0.4], Direction::Ascending).unwrap();
        let m = AggregationModel::scored(
            ApproachKind::Wpm,
            vec![f.clone(), f],
            WeightVector::uniform(2),
        )
        .unwrap();
        // both scores 0 -> clamped to 1/4
        let v = m.predict(&[0.0, 0.0]).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn predict_all_examples() {
        let rows = array![[0.1, 0.9], [0.1, 0.8]];
        assert_eq!(basic(ApproachKind::Min, 2).predict_all(rows.view()).unwrap(), [0.1, 0.1]);
        let reg = AggregationModel::regression(vec![0.5, 0.5]).unwrap();
        let rows = array![[0.0, 0.0], [1.0, 1.0]];
        assert_eq!(reg.predict_all(rows.view()).unwrap(), [0.0, 1.0]);
        let wide = array![[0.0, 0.0, 0.0]];
        assert!(matches!(
            reg.predict_all(wide.view()),
            Err(Error::ArityMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn wsm_outputs_on_training_data_in_unit_interval() {
        let d = Dataset::from_columns(
            &[vec![0.0, 0.3, 0.6, 1.0, 0.2], vec![1.0, 0.1, 0.5, 0.0, 0.9]],
            None,
        )
        .unwrap();
        let m = fit(ApproachKind::Wsm, &d, &FitConfig::default()).unwrap();
        for v in m.predict_all(d.inputs()).unwrap() {
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn wsm_on_identical_columns_is_symmetric() {
        let c = vec![0.0, 0.25, 0.5, 1.0];
        let d = Dataset::from_columns(&[c.clone(), c], None).unwrap();
        let m = fit(ApproachKind::Wsm, &d, &FitConfig::default()).unwrap();
        assert_eq!(m.weights().unwrap(), [0.5, 0.5]);
    }

    #[test]
    fn reg_recovers_second_column() {
        let c1: Vec<f64> = vec![0.0, 0.4, 0.9, 1.0, 0.3];
        let c2 = vec![0.7, 0.1, 0.0, 1.0, 0.5];
        let d = Dataset::from_columns(&[c1, c2.clone()], Some(c2)).unwrap();
        let m = fit(ApproachKind::Reg, &d, &FitConfig::default()).unwrap();
        let w = m.weights().unwrap();
        assert!(w[0].abs() < 1e-6 && (w[1] - 1.0).abs() < 1e-6, "{w:?}");
    }

    #[test]
    fn reg_without_response_fails() {
        let d = Dataset::from_columns(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        assert!(matches!(
            fit(ApproachKind::Reg, &d, &FitConfig::default()),
            Err(Error::MissingResponse)
        ));
    }

    #[test]
    fn basic_fit_is_stateless() {
        let d = Dataset::from_columns(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        let m = fit(ApproachKind::Min, &d, &FitConfig::default()).unwrap();
        assert_eq!(m, AggregationModel::basic(ApproachKind::Min, 2).unwrap());
        assert!(m.weights().is_none());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("wpm".parse::<ApproachKind>().unwrap(), ApproachKind::Wpm);
        assert_eq!(
            ApproachKind::parse_list("wpm, wsm,reg,wpm").unwrap(),
            [ApproachKind::Wpm, ApproachKind::Wsm, ApproachKind::Reg]
        );
        assert!("avg".parse::<ApproachKind>().is_err());
    }
}
