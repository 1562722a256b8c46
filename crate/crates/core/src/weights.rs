//! Unsupervised weight learning for the scored approaches.
//!
//! A variable's weight is proportional to the product of two parts:
//!
//! - the entropy part, its share of the total Shannon entropy of the score
//!   columns (variables that discriminate between rows weigh more);
//! - the dependency part, its share of `1 - rho_i`, where `rho_i` is the
//!   absolute Spearman correlation between the variable's scores and the joint
//!   dominance ranking (variables the joint ranking already follows weigh less).
//!
//! Degenerate inputs never abort learning: every undefined normalization falls
//! back to uniform weights and is recorded in [`WeightVector::fallbacks`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::spearman_rho;
use crate::scalar::Scalar;
use crate::scoring::ScoreMatrix;

/// Denominator threshold under which dependency weights are undefined.
pub const DEPENDENCY_EPS: f64 = 1e-12;

/// Rows above which the parallel dominance loop is used.
const PARALLEL_ROWS: usize = 1024;

/// Shannon entropy (natural log) of the empirical distribution of distinct values.
pub fn entropy<T: Scalar>(column: &[T]) -> T {
    let n = column.len();
    if n == 0 {
        return T::zero();
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
    let nn = T::of_usize(n);
    let mut h = T::zero();
    for run in sorted.chunk_by(|a, b| a == b) {
        let p = T::of_usize(run.len()) / nn;
        h -= p * p.ln();
    }
    // a single atom gives -1 * ln 1 = -0.0
    h.max(T::zero())
}

pub fn entropy_in_base<T: Scalar>(column: &[T], base: T) -> T {
    entropy(column) / base.ln()
}

/// `H_i / sum(H)` over the score columns.
pub fn entropy_weights<T: Scalar>(s: &ScoreMatrix<T>) -> Result<Vec<T>> {
    normalize_entropies(s.columns().iter().map(|c| entropy(c)).collect())
}

/// Entropy weights with logarithms in an arbitrary base; identical to
/// [`entropy_weights`] up to rounding.
pub fn entropy_weights_in_base<T: Scalar>(s: &ScoreMatrix<T>, base: T) -> Result<Vec<T>> {
    normalize_entropies(s.columns().iter().map(|c| entropy_in_base(c, base)).collect())
}

fn normalize_entropies<T: Scalar>(h: Vec<T>) -> Result<Vec<T>> {
    let total: T = h.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::AllZeroEntropy);
    }
    Ok(h.into_iter().map(|v| v / total).collect())
}

/// Row subsampling policy for the dominance ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceConfig {
    /// Above this many rows, a seeded uniform subsample of this size is ranked.
    /// `None` always ranks every row.
    pub cap: Option<usize>,
    pub seed: u64,
}

impl Default for DominanceConfig {
    fn default() -> Self {
        Self {
            cap: Some(20_000),
            seed: 0,
        }
    }
}

impl DominanceConfig {
    pub fn exact() -> Self {
        Self {
            cap: None,
            seed: 0,
        }
    }
}

/// Joint dominance ranking: for each row, the fraction of rows it weakly
/// dominates in every score coordinate (itself included).
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceRanking<T = f64> {
    r_values: Vec<T>,
    rows: Option<Vec<usize>>,
}

impl<T: Scalar> DominanceRanking<T> {
    pub fn r_values(&self) -> &[T] {
        &self.r_values
    }

    /// Training rows ranked, when subsampled; `None` means all rows in order.
    pub fn rows(&self) -> Option<&[usize]> {
        self.rows.as_deref()
    }

    /// Score column `i` restricted to the ranked rows.
    pub fn r_i(&self, s: &ScoreMatrix<T>, i: usize) -> Vec<T> {
        match &self.rows {
            None => s.column(i).to_vec(),
            Some(rows) => rows.iter().map(|&j| s.get(j, i)).collect(),
        }
    }
}

pub fn dominance_rank<T: Scalar>(s: &ScoreMatrix<T>, config: &DominanceConfig) -> DominanceRanking<T> {
    let n = s.n();
    let rows = match config.cap {
        Some(cap) if n > cap && cap > 0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut idx = rand::seq::index::sample(&mut rng, n, cap).into_vec();
            idx.sort_unstable();
            log::info!("dominance ranking subsampled to {cap} of {n} rows");
            Some(idx)
        }
        _ => None,
    };
    let k = s.k();
    let selected: Vec<usize> = rows.clone().unwrap_or_else(|| (0..n).collect());
    let m = selected.len();
    // row-major copy of the ranked rows
    let mut points = Vec::with_capacity(m * k);
    for &j in &selected {
        points.extend((0..k).map(|i| s.get(j, i)));
    }
    let r_values = dominance_counts(&points, m, k)
        .into_iter()
        .map(|c| T::of_usize(c) / T::of_usize(m))
        .collect();
    DominanceRanking { r_values, rows }
}

/// For each of the `m` row-major points, how many points are `<=` it in every coordinate.
fn dominance_counts<T: Scalar>(points: &[T], m: usize, k: usize) -> Vec<usize> {
    if m == 0 {
        return Vec::new();
    }
    // Sorting by the first coordinate bounds the candidate set of each row to a prefix.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| points[a * k].as_f64().total_cmp(&points[b * k].as_f64()));
    let first: Vec<T> = order.iter().map(|&a| points[a * k]).collect();
    let count_for = |j: usize| {
        let row = &points[j * k..(j + 1) * k];
        let end = first.partition_point(|&v| v <= row[0]);
        order[..end]
            .iter()
            .filter(|&&c| {
                let other = &points[c * k..(c + 1) * k];
                other[1..].iter().zip(&row[1..]).all(|(a, b)| a <= b)
            })
            .count()
    };
    if m >= PARALLEL_ROWS {
        (0..m).into_par_iter().map(count_for).collect()
    } else {
        (0..m).map(count_for).collect()
    }
}

/// `|rho_i|`, the absolute Spearman correlation between each score column and
/// the dominance ranking. Undefined correlations (constant columns) are 0.
pub fn dependency_rho<T: Scalar>(s: &ScoreMatrix<T>, d: &DominanceRanking<T>) -> Result<Vec<T>> {
    (0..s.k())
        .map(|i| {
            let rho = spearman_rho(&d.r_i(s, i), d.r_values())?;
            Ok(if rho.is_nan() {
                T::zero()
            } else {
                T::of(rho.abs().min(1.0))
            })
        })
        .collect()
}

/// `(1 - rho_i) / (k - sum(rho))`.
pub fn dependency_weights_from_rho<T: Scalar>(rho: &[T]) -> Result<Vec<T>> {
    let k = T::of_usize(rho.len());
    let denom = k - rho.iter().copied().sum::<T>();
    if !(denom > T::of(DEPENDENCY_EPS)) {
        return Err(Error::DegenerateDependency);
    }
    Ok(rho.iter().map(|&r| (T::one() - r) / denom).collect())
}

pub fn dependency_weights<T: Scalar>(s: &ScoreMatrix<T>, d: &DominanceRanking<T>) -> Result<Vec<T>> {
    dependency_weights_from_rho(&dependency_rho(s, d)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightFallback {
    AllZeroEntropy,
    DegenerateDependency,
    ZeroProduct,
}

/// Learned weights on the probability simplex with their entropy and
/// dependency parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector<T = f64> {
    weights: Vec<T>,
    entropy_parts: Vec<T>,
    dependency_parts: Vec<T>,
    #[serde(default)]
    fallbacks: Vec<WeightFallback>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn uniform(k: usize) -> Self {
        let u = vec![T::one() / T::of_usize(k); k];
        Self {
            weights: u.clone(),
            entropy_parts: u.clone(),
            dependency_parts: u,
            fallbacks: Vec::new(),
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn entropy_parts(&self) -> &[T] {
        &self.entropy_parts
    }

    pub fn dependency_parts(&self) -> &[T] {
        &self.dependency_parts
    }

    pub fn fallbacks(&self) -> &[WeightFallback] {
        &self.fallbacks
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.weights.len();
        if self.entropy_parts.len() != k || self.dependency_parts.len() != k {
            return Err(Error::Model("weight part lengths differ".into()));
        }
        let tol = T::of(1e-9).max(T::epsilon() * T::of(64.0));
        for part in [&self.weights, &self.entropy_parts, &self.dependency_parts] {
            if part.iter().any(|w| !w.is_finite() || *w < T::zero()) {
                return Err(Error::Model("weights must be finite and non-negative".into()));
            }
            let sum: T = part.iter().copied().sum();
            if (sum - T::one()).abs() > tol {
                return Err(Error::Model(format!("weights sum to {sum}, not 1")));
            }
        }
        Ok(())
    }
}

/// Normalized elementwise product of entropy and dependency weights.
pub fn combine_weights<T: Scalar>(ent: &[T], dep: &[T]) -> Result<WeightVector<T>> {
    if ent.len() != dep.len() {
        return Err(Error::LengthMismatch {
            expected: ent.len(),
            got: dep.len(),
        });
    }
    let prod: Vec<T> = ent.iter().zip(dep).map(|(&a, &b)| a * b).collect();
    let total: T = prod.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::ZeroProduct);
    }
    let mut weights: Vec<T> = prod.into_iter().map(|p| p / total).collect();
    crate::solver::snap_unit_sum(&mut weights);
    Ok(WeightVector {
        weights,
        entropy_parts: ent.to_vec(),
        dependency_parts: dep.to_vec(),
        fallbacks: Vec::new(),
    })
}

/// Full weight learning on a score matrix, resolving every degenerate case to
/// uniform weights with a warning.
pub fn learn_weights<T: Scalar>(s: &ScoreMatrix<T>, config: &DominanceConfig) -> WeightVector<T> {
    let k = s.k();
    let uniform = vec![T::one() / T::of_usize(k); k];
    let mut fallbacks = Vec::new();

    let ent = entropy_weights(s).unwrap_or_else(|e| {
        log::warn!("{e}; using uniform entropy weights");
        fallbacks.push(WeightFallback::AllZeroEntropy);
        uniform.clone()
    });
    let ranking = dominance_rank(s, config);
    let dep = match dependency_weights(s, &ranking) {
        Ok(d) => d,
        Err(e) => {
            log::warn!("{e}; using uniform dependency weights");
            fallbacks.push(WeightFallback::DegenerateDependency);
            uniform.clone()
        }
    };
    let mut wv = combine_weights(&ent, &dep).unwrap_or_else(|e| {
        log::warn!("{e}; using uniform weights");
        fallbacks.push(WeightFallback::ZeroProduct);
        WeightVector {
            weights: uniform.clone(),
            entropy_parts: ent.clone(),
            dependency_parts: dep.clone(),
            fallbacks: Vec::new(),
        }
    });
    wv.fallbacks = fallbacks;
    wv
}
