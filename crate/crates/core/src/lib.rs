//! Learned and basic aggregation of numeric input variables, evaluated with
//! rank-based measures over regression datasets.
//!
//! Seven approaches are provided behind one fit/predict contract:
//!
//! - basic functions `PROD`, `MIN`, `MAX` and `SUM`;
//! - `WSM` and `WPM`, a weighted sum and a weighted product of empirical-CDF
//!   scores with weights learned from the inputs alone (entropy and dependency
//!   on the joint dominance ranking);
//! - `REG`, a supervised baseline whose weights solve a least-squares problem
//!   constrained to the probability simplex.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`). The `*64` and
//! `*32` aliases below name the concrete instantiations; the benchmark harness
//! and the CLI work in `f64`.

// `!(x > 0)` is used on purpose so that NaN takes the degenerate branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod bench;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod model_file;
pub mod scalar;
pub mod scoring;
pub mod solver;
pub mod synthetic;
pub mod weights;

pub use aggregate::{fit, fit_unsupervised, AggregationModel, ApproachKind, FitConfig};
pub use error::{Error, Result};
pub use ingest::{load_csv, minmax_scale, Dataset, DatasetConfig, MinMaxScaler, ResponseColumn};
pub use metrics::{MeasureSet, Ranking};
pub use scalar::Scalar;
pub use scoring::{Direction, ScoreFunction, ScoreMatrix};
pub use solver::{solve_simplex_ls, SimplexLsProblem, SimplexLsSolution};
pub use weights::{DominanceConfig, DominanceRanking, WeightVector};
pub use ndarray;

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type ScoreFunction64 = ScoreFunction<f64>;
pub type ScoreFunction32 = ScoreFunction<f32>;
pub type ScoreMatrix64 = ScoreMatrix<f64>;
pub type ScoreMatrix32 = ScoreMatrix<f32>;
pub type WeightVector64 = WeightVector<f64>;
pub type WeightVector32 = WeightVector<f32>;
pub type Model64 = AggregationModel<f64>;
pub type Model32 = AggregationModel<f32>;
pub type SimplexLsProblem64 = SimplexLsProblem<f64>;
pub type SimplexLsProblem32 = SimplexLsProblem<f32>;
