//! Seeded synthetic regression datasets with a known aggregation structure.
//!
//! Inputs are noisy monotone views of one shared latent factor, each with its
//! own marginal shape: a logistic squashing of `loading * z + e_i` raised to a
//! per-column power, then min-max scaled. The response is a monotone function
//! (the square) of a hidden weighted sum of the inputs, with Gaussian noise
//! whose standard deviation is a fraction of the noiseless response range.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::ingest::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct LatentFactorSpec {
    pub n: usize,
    pub k: usize,
    /// Weight of the shared factor relative to unit idiosyncratic noise.
    pub loading: f64,
    /// Marginal exponents, cycled over the columns.
    pub powers: Vec<f64>,
    /// Response noise standard deviation as a fraction of the response range.
    pub noise_fraction: f64,
    pub seed: u64,
}

impl Default for LatentFactorSpec {
    fn default() -> Self {
        Self {
            n: 500,
            k: 4,
            loading: 1.0,
            powers: vec![0.5, 1.0, 2.0, 3.0],
            noise_fraction: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub dataset: Dataset<f64>,
    pub hidden_weights: Vec<f64>,
}

pub fn latent_factor_dataset(spec: &LatentFactorSpec) -> Result<SyntheticDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, k) = (spec.n, spec.k);
    let scale = (1.0 + spec.loading * spec.loading).sqrt();
    let latent: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut x = Array2::<f64>::zeros((n, k));
    for j in 0..n {
        for i in 0..k {
            let e: f64 = rng.sample(StandardNormal);
            let t = (spec.loading * latent[j] + e) / scale;
            let u = 1.0 / (1.0 + (-1.702 * t).exp());
            x[[j, i]] = u.powf(spec.powers[i % spec.powers.len()]);
        }
    }
    for mut col in x.columns_mut() {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        col.mapv_inplace(|v| (v - lo) / (hi - lo));
    }

    // flat Dirichlet via normalized exponentials
    let mut hidden: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = hidden.iter().sum();
    hidden.iter_mut().for_each(|w| *w /= total);

    let signal: Vec<f64> = x
        .rows()
        .into_iter()
        .map(|r| {
            let h: f64 = r.iter().zip(&hidden).map(|(a, b)| a * b).sum();
            h * h
        })
        .collect();
    let lo = signal.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = signal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sigma = spec.noise_fraction * (hi - lo);
    let response = signal
        .iter()
        .map(|s| s + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let names = (1..=k).map(|i| format!("x{i}")).collect();
    let dataset = Dataset::new(x, Some(response), names)?.with_response_name(Some("y".into()));
    Ok(SyntheticDataset {
        dataset,
        hidden_weights: hidden,
    })
}

/// `n x k` inputs drawn uniformly from `[0, 1)`, response their mean.
pub fn uniform_mean_dataset(n: usize, k: usize, seed: u64) -> Result<Dataset<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((n, k), |_| rng.random::<f64>());
    let y = x.rows().into_iter().map(|r| r.sum() / k as f64).collect();
    let names = (1..=k).map(|i| format!("x{i}")).collect();
    Dataset::new(x, Some(y), names)
}
