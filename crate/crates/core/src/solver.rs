//! Least squares over the probability simplex:
//! minimize `|X w - y|^2` subject to `w >= 0`, `sum(w) = 1`.
//!
//! Solved by projected gradient descent with the constant step `1/L`, where
//! `L` is the largest eigenvalue of `2 X^T X`. The iteration works on the
//! `k x k` Gram matrix, so each step costs `O(k^2)` regardless of `n`.
//!
//! With a single row every simplex point fitting the one equation is optimal;
//! the solver returns whichever one the iteration reaches.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const POWER_ITERATIONS: usize = 100;

#[derive(Debug, Clone)]
pub struct SimplexLsProblem<T = f64> {
    pub x: Array2<T>,
    pub y: Vec<T>,
    /// Convergence threshold on the norm of the gradient mapping.
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Scalar> SimplexLsProblem<T> {
    pub fn new(x: Array2<T>, y: Vec<T>) -> Self {
        Self {
            x,
            y,
            tolerance: T::of(1e-9),
            max_iterations: 50_000,
        }
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    /// `sum_j (sum_i w_i x_ji - y_j)^2`, computed from the residuals.
    pub fn objective(&self, w: &[T]) -> T {
        objective(self.x.view(), &self.y, w)
    }
}

pub fn objective<T: Scalar>(x: ArrayView2<'_, T>, y: &[T], w: &[T]) -> T {
    x.rows()
        .into_iter()
        .zip(y)
        .map(|(row, &yj)| {
            let fit: T = row.iter().zip(w).map(|(&a, &b)| a * b).sum();
            let r = fit - yj;
            r * r
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexLsSolution<T = f64> {
    pub weights: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    /// False when `max_iterations` was reached before the tolerance.
    pub converged: bool,
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_to_simplex<T: Scalar>(v: &[T]) -> Vec<T> {
    let k = v.len();
    if k == 0 {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.as_f64().total_cmp(&a.as_f64()));
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - T::one()) / T::of_usize(j + 1);
        if uj - t > T::zero() {
            theta = t;
        }
    }
    let mut w: Vec<T> = v.iter().map(|&x| (x - theta).max(T::zero())).collect();
    // remove rounding drift so the result sums to 1
    let total: T = w.iter().copied().sum();
    if total > T::zero() {
        for wi in &mut w {
            *wi /= total;
        }
    } else {
        w = vec![T::one() / T::of_usize(k); k];
    }
    w
}

/// Rounds simplex weights to multiples of machine epsilon, giving the
/// leftover units to the largest weight. Every partial sum is then exact, so
/// the weights sum to exactly one in any order.
pub(crate) fn snap_unit_sum<T: Scalar>(w: &mut [T]) {
    let Some(big) = (0..w.len()).max_by(|&a, &b| w[a].as_f64().total_cmp(&w[b].as_f64())) else {
        return;
    };
    let unit = T::epsilon();
    let mut units: Vec<T> = w.iter().map(|&v| (v / unit).round().max(T::zero())).collect();
    let total: T = units.iter().copied().sum();
    units[big] = (units[big] + (T::one() / unit - total)).max(T::zero());
    for (wi, u) in w.iter_mut().zip(units) {
        *wi = u * unit;
    }
}

struct Quadratic<T> {
    /// `2 X^T X`
    hessian: Vec<T>,
    /// `2 X^T y`
    linear: Vec<T>,
    k: usize,
}

impl<T: Scalar> Quadratic<T> {
    fn new(x: ArrayView2<'_, T>, y: &[T]) -> Self {
        let k = x.ncols();
        let mut hessian = vec![T::zero(); k * k];
        let mut linear = vec![T::zero(); k];
        let two = T::of(2.0);
        for (row, &yj) in x.rows().into_iter().zip(y) {
            for a in 0..k {
                let ra = row[a];
                linear[a] += two * ra * yj;
                for b in a..k {
                    hessian[a * k + b] += two * ra * row[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                hessian[a * k + b] = hessian[b * k + a];
            }
        }
        Self { hessian, linear, k }
    }

    fn gradient(&self, w: &[T], out: &mut [T]) {
        for (a, g) in out.iter_mut().enumerate() {
            let row = &self.hessian[a * self.k..(a + 1) * self.k];
            *g = row.iter().zip(w).map(|(&h, &wi)| h * wi).sum::<T>() - self.linear[a];
        }
    }

    /// Largest eigenvalue by power iteration, never below the mean diagonal.
    fn lipschitz(&self) -> T {
        let k = self.k;
        let mut v: Vec<T> = (0..k).map(|i| T::one() + T::of(i as f64 * 0.01)).collect();
        let mut lambda = T::zero();
        let mut next = vec![T::zero(); k];
        for _ in 0..POWER_ITERATIONS {
            for (a, out) in next.iter_mut().enumerate() {
                let row = &self.hessian[a * k..(a + 1) * k];
                *out = row.iter().zip(&v).map(|(&h, &x)| h * x).sum();
            }
            let norm = next.iter().map(|&x| x * x).sum::<T>().sqrt();
            if !(norm > T::zero()) {
                break;
            }
            let vnorm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            lambda = norm / vnorm;
            for (vi, &ni) in v.iter_mut().zip(&next) {
                *vi = ni / norm;
            }
        }
        let trace: T = (0..k).map(|a| self.hessian[a * k + a]).sum();
        lambda.max(trace / T::of_usize(k))
    }
}

/// Projected gradient descent from the uniform point.
pub fn solve_simplex_ls<T: Scalar>(p: &SimplexLsProblem<T>) -> Result<SimplexLsSolution<T>> {
    solve_impl(p, None, None)
}

/// Same as [`solve_simplex_ls`], from a caller-chosen starting point (projected first).
pub fn solve_simplex_ls_from<T: Scalar>(
    p: &SimplexLsProblem<T>,
    start: &[T],
) -> Result<SimplexLsSolution<T>> {
    solve_impl(p, Some(start), None)
}

/// Runs the solver and also returns the objective after every iteration.
pub fn solve_simplex_ls_traced<T: Scalar>(
    p: &SimplexLsProblem<T>,
) -> Result<(SimplexLsSolution<T>, Vec<T>)> {
    let mut trace = Vec::new();
    let sol = solve_impl(p, None, Some(&mut trace))?;
    Ok((sol, trace))
}

fn solve_impl<T: Scalar>(
    p: &SimplexLsProblem<T>,
    start: Option<&[T]>,
    mut trace: Option<&mut Vec<T>>,
) -> Result<SimplexLsSolution<T>> {
    let (n, k) = p.x.dim();
    if p.y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: p.y.len(),
        });
    }
    if k == 0 {
        return Err(Error::InsufficientData("no columns".into()));
    }
    if p.x.iter().chain(&p.y).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }

    let mut w = match start {
        Some(s) if s.len() == k => project_to_simplex(s),
        Some(s) => {
            return Err(Error::LengthMismatch {
                expected: k,
                got: s.len(),
            })
        }
        None => vec![T::one() / T::of_usize(k); k],
    };

    let q = Quadratic::new(p.x.view(), &p.y);
    let lip = q.lipschitz();
    if !(lip > T::zero()) {
        // X = 0: the objective is constant on the simplex
        snap_unit_sum(&mut w);
        return Ok(SimplexLsSolution {
            objective: p.objective(&w),
            weights: w,
            iterations: 0,
            converged: true,
        });
    }
    let step = T::one() / lip;

    let mut grad = vec![T::zero(); k];
    let mut trial = vec![T::zero(); k];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < p.max_iterations {
        q.gradient(&w, &mut grad);
        for ((t, &wi), &g) in trial.iter_mut().zip(&w).zip(&grad) {
            *t = wi - step * g;
        }
        let next = project_to_simplex(&trial);
        let mapping_norm = next
            .iter()
            .zip(&w)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
            * lip;
        w = next;
        iterations += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(p.objective(&w));
        }
        if mapping_norm <= p.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!(
            "simplex least squares stopped after {iterations} iterations without reaching tolerance {}",
            p.tolerance
        );
    }
    snap_unit_sum(&mut w);
    Ok(SimplexLsSolution {
        objective: p.objective(&w),
        weights: w,
        iterations,
        converged,
    })
}
