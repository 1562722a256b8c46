//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use aggeval::bench::{run_benchmark, BenchmarkConfig};
use aggeval::metrics::{discordant_pairs, evaluate, kendall_tau_distance, spearman_rho};
use aggeval::ndarray::Array2;
use aggeval::scoring::fit_score_matrix;
use aggeval::solver::objective;
use aggeval::synthetic::{latent_factor_dataset, LatentFactorSpec};
use aggeval::weights::{dominance_rank, entropy_weights, entropy_weights_in_base};
use aggeval::{
    fit, fit_unsupervised, AggregationModel, ApproachKind, Dataset, Direction, DominanceConfig,
    FitConfig, Ranking, ScoreFunction, ScoreMatrix, SimplexLsProblem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weights of every WSM/WPM/REG model fitted anywhere in this suite.
static FITTED_WEIGHTS: Mutex<Vec<(ApproachKind, Vec<f64>)>> = Mutex::new(Vec::new());

fn record(model: &AggregationModel) {
    if let Some(w) = model.weights() {
        FITTED_WEIGHTS
            .lock()
            .unwrap()
            .push((model.kind(), w.to_vec()));
    }
}

fn fit_any(kind: ApproachKind, d: &Dataset) -> AggregationModel {
    let cfg = FitConfig::default();
    let m = if kind.is_supervised() {
        fit(kind, d, &cfg)
    } else {
        fit_unsupervised(kind, d.inputs(), &cfg)
    }
    .unwrap();
    record(&m);
    m
}

fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, k), |_| rng.random::<f64>())
}

fn dataset(x: Array2<f64>, y: Vec<f64>) -> Result<Dataset, aggeval::Error> {
    let names = (1..=x.ncols()).map(|i| format!("x{i}")).collect();
    Dataset::new(x, Some(y), names)
}

type Outcome = Result<String, String>;
type Criterion<'a> = (u32, &'a str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let mut checks = 0usize;
    for k in [2usize, 5, 20] {
        let train = uniform_matrix(&mut rng, 200, k);
        let y: Vec<f64> = train.rows().into_iter().map(|r| r.sum() / k as f64).collect();
        let d = dataset(train, y).unwrap();
        for kind in ApproachKind::ALL {
            let model = fit_any(kind, &d);
            let directions: Vec<Direction> = match model.score_functions() {
                Some(fs) => fs.iter().map(|f| f.direction()).collect(),
                None => vec![Direction::Ascending; k],
            };
            for _ in 0..1000 {
                let x: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
                let i = rng.random_range(0..k);
                let mut moved = x.clone();
                // move toward "better" along the learned direction
                moved[i] = match directions[i] {
                    Direction::Ascending => rng.random_range(x[i]..=1.0),
                    Direction::Descending => rng.random_range(0.0..=x[i]),
                };
                let (a, b) = (model.predict(&x).unwrap(), model.predict(&moved).unwrap());
                checks += 1;
                if b < a {
                    failures.push(format!("{kind} k={k}: {a} -> {b}"));
                }
            }
            let zeros = model.predict(&vec![0.0; k]).unwrap();
            let ones = model.predict(&vec![1.0; k]).unwrap();
            let expected_top = if kind == ApproachKind::Sum { k as f64 } else { 1.0 };
            if matches!(
                kind,
                ApproachKind::Prod | ApproachKind::Min | ApproachKind::Max | ApproachKind::Sum | ApproachKind::Reg
            ) {
                checks += 2;
                if zeros != 0.0 || ones != expected_top {
                    failures.push(format!("{kind} k={k}: f(0)={zeros}, f(1)={ones}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!(
            "{checks} checks, {} violations, {:.2?}{}",
            failures.len(),
            elapsed,
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ),
    )
}

fn count_score(training: &[f64], v: f64, direction: Direction) -> f64 {
    let c = match direction {
        Direction::Ascending => training.iter().filter(|&&t| t <= v).count(),
        Direction::Descending => training.iter().filter(|&&t| t >= v).count(),
    };
    c as f64 / training.len() as f64
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut checks = 0;
    for c in 0..200 {
        let n = rng.random_range(1..=500);
        let levels = rng.random_range(1..=n.max(2));
        let column: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..levels) as f64 / levels as f64)
            .collect();
        let direction = if c % 2 == 0 { Direction::Ascending } else { Direction::Descending };
        let f = ScoreFunction::fit(&column, direction).unwrap();
        let queries = (0..50).map(|_| rng.random_range(-0.2..1.2));
        for v in column.iter().copied().chain(queries) {
            checks += 1;
            if f.apply(v) != count_score(&column, v, direction) {
                mismatches += 1;
            }
        }
    }
    check(mismatches == 0, format!("{checks} evaluations, {mismatches} mismatches"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=200);
        let k = rng.random_range(2..=10);
        let levels = rng.random_range(2..=20);
        let columns: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| rng.random_range(0..=levels) as f64 / levels as f64)
                    .collect()
            })
            .collect();
        let s = ScoreMatrix::from_columns(columns.clone()).unwrap();
        let r = dominance_rank(&s, &DominanceConfig::exact());
        for j in 0..n {
            let mut count = 0usize;
            for l in 0..n {
                if (0..k).all(|i| columns[i][l] <= columns[i][j]) {
                    count += 1;
                }
            }
            if r.r_values()[j] != count as f64 / n as f64 {
                mismatches += 1;
            }
        }
    }
    check(mismatches == 0, format!("100 matrices, {mismatches} mismatched rows"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_base = 0f64;
    for _ in 0..100 {
        let n = rng.random_range(5..=300);
        let k = rng.random_range(2..=12);
        let levels = rng.random_range(2..=50);
        let x = Array2::from_shape_fn((n, k), |_| rng.random_range(0..levels) as f64);
        let s = fit_score_matrix(x.view()).unwrap();
        let Ok(natural) = entropy_weights(&s) else {
            continue;
        };
        for base in [2.0, 10.0, 7.5] {
            let w = entropy_weights_in_base(&s, base).unwrap();
            for (a, b) in natural.iter().zip(&w) {
                worst_base = worst_base.max((a - b).abs());
            }
        }
        let y: Vec<f64> = x.rows().into_iter().map(|r| r.sum()).collect();
        let scaled = aggeval::minmax_scale(&dataset(x, y).unwrap());
        if let Ok(d) = scaled {
            for kind in [ApproachKind::Wsm, ApproachKind::Wpm, ApproachKind::Reg] {
                fit_any(kind, &d);
            }
        }
    }
    let all = FITTED_WEIGHTS.lock().unwrap();
    let mut worst_sum = 0f64;
    let mut negative = 0;
    for (_, w) in all.iter() {
        negative += w.iter().filter(|&&v| v < 0.0).count();
        worst_sum = worst_sum.max((w.iter().sum::<f64>() - 1.0).abs());
    }
    check(
        negative == 0 && worst_sum <= 1e-9 && worst_base <= 1e-12,
        format!(
            "{} fitted models, {negative} negative weights, max |sum-1| = {worst_sum:.1e}, max base deviation = {worst_base:.1e}",
            all.len()
        ),
    )
}

/// Gram form of the least-squares objective, used as an oracle independent of
/// the solver's own objective routine.
struct Gram {
    g: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: f64,
}

impl Gram {
    fn new(x: &Array2<f64>, y: &[f64]) -> Self {
        let k = x.ncols();
        let mut g = vec![vec![0.0; k]; k];
        let mut b = vec![0.0; k];
        for (row, &yj) in x.rows().into_iter().zip(y) {
            for a in 0..k {
                b[a] += row[a] * yj;
                for c in 0..k {
                    g[a][c] += row[a] * row[c];
                }
            }
        }
        Self { g, b, c: y.iter().map(|v| v * v).sum() }
    }

    fn value(&self, w: &[f64]) -> f64 {
        let k = w.len();
        let mut q = 0.0;
        for a in 0..k {
            for c in 0..k {
                q += w[a] * self.g[a][c] * w[c];
            }
        }
        q - 2.0 * (0..k).map(|a| self.b[a] * w[a]).sum::<f64>() + self.c
    }
}

/// Best simplex point on a grid of step `step` restricted to a box around `center`.
fn grid_search(gram: &Gram, k: usize, step: f64, center: Option<(&[f64], f64)>) -> (f64, Vec<f64>) {
    let range = |i: usize| -> (f64, f64) {
        match center {
            Some((c, r)) => ((c[i] - r).max(0.0), (c[i] + r).min(1.0)),
            None => (0.0, 1.0),
        }
    };
    let steps = |lo: f64, hi: f64| ((hi - lo) / step).round() as usize;
    let mut best = (f64::INFINITY, Vec::new());
    let (lo0, hi0) = range(0);
    for a in 0..=steps(lo0, hi0) {
        let w0 = (lo0 + a as f64 * step).min(1.0);
        if k == 2 {
            let w = [w0, 1.0 - w0];
            let v = gram.value(&w);
            if v < best.0 {
                best = (v, w.to_vec());
            }
            continue;
        }
        let (lo1, hi1) = range(1);
        let hi1 = hi1.min(1.0 - w0);
        if hi1 < lo1 {
            continue;
        }
        for b in 0..=steps(lo1, hi1) {
            let w1 = (lo1 + b as f64 * step).min(1.0 - w0);
            let w = [w0, w1, (1.0 - w0 - w1).max(0.0)];
            let v = gram.value(&w);
            if v < best.0 {
                best = (v, w.to_vec());
            }
        }
    }
    best
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_vs_raw = f64::NEG_INFINITY;
    let mut worst_abs_raw = 0f64;
    let mut worst_refined = 0f64;
    for p in 0..50 {
        let k = 2 + p % 2;
        let n = rng.random_range(3..=100);
        let x = uniform_matrix(&mut rng, n, k);
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let sol = aggeval::solve_simplex_ls(&SimplexLsProblem::new(x.clone(), y.clone())).unwrap();
        record(&AggregationModel::regression(sol.weights.clone()).unwrap());
        let gram = Gram::new(&x, &y);
        let (raw, mut w) = grid_search(&gram, k, 0.001, None);
        let mut refined = raw;
        let mut step = 0.001;
        for _ in 0..4 {
            let (v, wn) = grid_search(&gram, k, step / 20.0, Some((&w, 2.0 * step)));
            if v < refined {
                refined = v;
                w = wn;
            }
            step /= 20.0;
        }
        worst_vs_raw = worst_vs_raw.max(sol.objective - raw);
        worst_abs_raw = worst_abs_raw.max((sol.objective - raw).abs());
        worst_refined = worst_refined.max((sol.objective - refined).abs());
    }

    let mut worst_exact = 0f64;
    for p in 0..50 {
        let k = rng.random_range(2..=6);
        let n = rng.random_range(k..=100);
        let x = uniform_matrix(&mut rng, n, k);
        let mut w: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        if p % 5 == 0 {
            w = vec![0.0; k];
            w[p % k] = 1.0;
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        let y: Vec<f64> = x.rows().into_iter().map(|r| r.dot(&aggeval::ndarray::arr1(&w))).collect();
        let sol = aggeval::solve_simplex_ls(&SimplexLsProblem::new(x.clone(), y.clone())).unwrap();
        record(&AggregationModel::regression(sol.weights.clone()).unwrap());
        worst_exact = worst_exact.max(objective(x.view(), &y, &sol.weights));
    }
    check(
        worst_vs_raw <= 1e-6 && worst_refined <= 1e-6 && worst_exact <= 1e-10,
        format!(
            "solver - grid(0.001) <= {worst_vs_raw:.1e}, |solver - refined grid| <= {worst_refined:.1e}, \
             |solver - grid(0.001)| <= {worst_abs_raw:.1e} (grid coarseness), exact-fit objective <= {worst_exact:.1e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=100);
        let levels = rng.random_range(2..=n.max(3));
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let mut naive = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                if (a[i] - a[j]) * (b[i] - b[j]) < 0.0 {
                    naive += 1;
                }
            }
        }
        let (ra, rb) = (Ranking::from_values(&a), Ranking::from_values(&b));
        let fast = discordant_pairs(&ra, &rb).unwrap();
        let d = kendall_tau_distance(&ra, &rb).unwrap();
        if fast != naive || d != naive as f64 / (n * (n - 1) / 2) as f64 {
            mismatches += 1;
        }
    }
    let mut extremes_ok = true;
    for n in [2usize, 3, 10, 100] {
        let v: Vec<f64> = (0..n).map(|i| i as f64 * 0.37).collect();
        let rev: Vec<f64> = v.iter().rev().copied().collect();
        let (r, rr) = (Ranking::from_values(&v), Ranking::from_values(&rev));
        extremes_ok &= kendall_tau_distance(&r, &r).unwrap() == 0.0;
        extremes_ok &= kendall_tau_distance(&r, &rr).unwrap() == 1.0;
    }
    check(
        mismatches == 0 && extremes_ok,
        format!("200 pairs, {mismatches} mismatches, identical/reversed extremes ok: {extremes_ok}"),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let kinds = [
        ApproachKind::Prod,
        ApproachKind::Min,
        ApproachKind::Max,
        ApproachKind::Wpm,
        ApproachKind::Wsm,
        ApproachKind::Reg,
    ];
    let mut power: Vec<Vec<f64>> = vec![Vec::new(); kinds.len()];
    for seed in 0..20 {
        let spec = LatentFactorSpec { seed, ..LatentFactorSpec::default() };
        let d = latent_factor_dataset(&spec).unwrap().dataset;
        for (slot, &kind) in power.iter_mut().zip(&kinds) {
            let out = fit_any(kind, &d).predict_all(d.inputs()).unwrap();
            slot.push(spearman_rho(&out, d.response().unwrap()).unwrap());
        }
    }
    let m: Vec<f64> = power.into_iter().map(median).collect();
    let (prod, min, max, wpm, wsm, reg) = (m[0], m[1], m[2], m[3], m[4], m[5]);
    let elapsed = start.elapsed();
    let ok = reg >= wpm - 0.05
        && [prod, min, max].iter().all(|&b| wpm > b && wsm > b)
        && elapsed < Duration::from_secs(60);
    check(
        ok,
        format!(
            "medians PROD {prod:.3} MIN {min:.3} MAX {max:.3} WPM {wpm:.3} WSM {wsm:.3} REG {reg:.3}, {elapsed:.2?}"
        ),
    )
}

fn distinct_rows(x: &Array2<f64>) -> usize {
    x.rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v.to_bits()).collect::<Vec<_>>())
        .collect::<std::collections::HashSet<_>>()
        .len()
}

fn sensitivities(d: &Dataset) -> Vec<(ApproachKind, f64)> {
    [ApproachKind::Wsm, ApproachKind::Wpm, ApproachKind::Reg, ApproachKind::Sum, ApproachKind::Min]
        .into_iter()
        .map(|kind| {
            let out = fit_any(kind, d).predict_all(d.inputs()).unwrap();
            (kind, evaluate(&out, d.inputs(), d.response()).unwrap().sensitivity)
        })
        .collect()
}

fn criterion_8(samples: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut datasets = Vec::new();
    for seed in 0..10 {
        let spec = LatentFactorSpec { seed: 100 + seed, ..LatentFactorSpec::default() };
        datasets.push(latent_factor_dataset(&spec).unwrap().dataset);
    }
    for _ in 0..20 {
        let n = rng.random_range(10..=400);
        let k = rng.random_range(2..=8);
        let x = uniform_matrix(&mut rng, n, k);
        let y: Vec<f64> = x.rows().into_iter().map(|r| r.iter().map(|v| v * v).sum()).collect();
        datasets.push(dataset(x, y).unwrap());
    }
    let cfg = BenchmarkConfig::from_path(&samples.join("bench.toml")).unwrap();
    let mut bundled = 0;
    for dcfg in &cfg.datasets {
        let d = aggeval::minmax_scale(&aggeval::load_csv::<f64>(dcfg).unwrap()).unwrap();
        if distinct_rows(&d.inputs().to_owned()) == d.n() {
            bundled += 1;
            datasets.push(d);
        }
    }
    let mut worst = 1f64;
    let mut min_violations = 0;
    for d in &datasets {
        assert_eq!(distinct_rows(&d.inputs().to_owned()), d.n());
        let s = sensitivities(d);
        let sum = s.iter().find(|(k, _)| *k == ApproachKind::Sum).unwrap().1;
        for &(kind, v) in &s {
            if kind == ApproachKind::Min {
                if v > sum {
                    min_violations += 1;
                }
            } else {
                worst = worst.min(v);
            }
        }
    }
    check(
        worst >= 0.99 && min_violations == 0,
        format!(
            "{} datasets with distinct rows ({bundled} bundled), lowest WSM/WPM/REG/SUM ratio {worst:.4}, MIN > SUM in {min_violations}",
            datasets.len()
        ),
    )
}

/// Per-sample sensitivities, including samples with duplicate rows.
fn criterion_8_samples(samples: &Path) -> String {
    let cfg = BenchmarkConfig::from_path(&samples.join("bench.toml")).unwrap();
    let mut parts = Vec::new();
    for dcfg in &cfg.datasets {
        let d = aggeval::minmax_scale(&aggeval::load_csv::<f64>(dcfg).unwrap()).unwrap();
        let distinct = distinct_rows(&d.inputs().to_owned()) == d.n();
        let s = sensitivities(&d);
        let fmt: Vec<String> = s.iter().map(|(k, v)| format!("{k} {v:.2}")).collect();
        parts.push(format!(
            "{}{}: {}",
            dcfg.dataset_id(),
            if distinct { "" } else { " (duplicate rows)" },
            fmt.join(" ")
        ));
    }
    parts.join("; ")
}

fn criterion_9(samples: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut datasets = Vec::new();
    for seed in 0..5 {
        let spec = LatentFactorSpec { seed: 200 + seed, ..LatentFactorSpec::default() };
        datasets.push(latent_factor_dataset(&spec).unwrap().dataset);
    }
    let cfg = BenchmarkConfig::from_path(&samples.join("bench.toml")).unwrap();
    for dcfg in &cfg.datasets {
        datasets.push(aggeval::minmax_scale(&aggeval::load_csv::<f64>(dcfg).unwrap()).unwrap());
    }
    let mut changed = Vec::new();
    for (di, d) in datasets.iter().enumerate() {
        let corrupted: Vec<f64> = (0..d.n()).map(|_| rng.random_range(-1e6..1e6)).collect();
        let e = d.replace_response(Some(corrupted)).unwrap();
        for kind in ApproachKind::ALL.into_iter().filter(|k| !k.is_supervised()) {
            let (m1, m2) = (fit_any(kind, d), fit_any(kind, &e));
            if serde_json::to_string(&m1).unwrap() != serde_json::to_string(&m2).unwrap() {
                changed.push(format!("dataset {di} {kind} model"));
            }
            let o1 = m1.predict_all(d.inputs()).unwrap();
            let o2 = m2.predict_all(e.inputs()).unwrap();
            let s1 = evaluate(&o1, d.inputs(), d.response()).unwrap();
            let s2 = evaluate(&o2, e.inputs(), e.response()).unwrap();
            if s1.consensus.to_bits() != s2.consensus.to_bits()
                || s1.sensitivity.to_bits() != s2.sensitivity.to_bits()
            {
                changed.push(format!("dataset {di} {kind} internal measures"));
            }
        }
    }

    // the same audit through the benchmark harness, on files differing only in the response
    let dir = tempfile::tempdir().unwrap();
    let d = &datasets[0];
    let write = |name: &str, y: &dyn Fn(usize) -> f64| {
        let mut s = String::from("a,b,c,d,y\n");
        for (j, row) in d.inputs().rows().into_iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("{},{}\n", cells.join(","), y(j)));
        }
        let p = dir.path().join(name);
        fs::write(&p, s).unwrap();
        p
    };
    let clean = write("clean.csv", &|j| d.response().unwrap()[j]);
    let noisy = write("noisy.csv", &|j| ((j * 7919) % 1013) as f64);
    let run = |p: &Path| {
        let dc = aggeval::DatasetConfig::new(p).with_response(aggeval::ResponseColumn::Name("y".into()));
        run_benchmark(&BenchmarkConfig::new(vec![dc])).unwrap()
    };
    let (r1, r2) = (run(&clean), run(&noisy));
    for (c1, c2) in r1.cells.iter().zip(&r2.cells) {
        if c1.approach.is_supervised() {
            continue;
        }
        let (m1, m2) = (c1.measures.as_ref().unwrap(), c2.measures.as_ref().unwrap());
        if c1.weights != c2.weights
            || m1.consensus.to_bits() != m2.consensus.to_bits()
            || m1.sensitivity.to_bits() != m2.sensitivity.to_bits()
        {
            changed.push(format!("bench cell {}", c1.approach));
        }
    }
    check(
        changed.is_empty(),
        format!(
            "{} datasets x 6 unsupervised kinds plus a benchmark run, {} differences{}",
            datasets.len(),
            changed.len(),
            changed.first().map(|c| format!(", first: {c}")).unwrap_or_default()
        ),
    )
}

fn criterion_10(samples: &Path) -> Outcome {
    let mut outputs = Vec::new();
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, workers) in dirs.iter().zip([1, 0]) {
        let mut cfg = BenchmarkConfig::from_path(&samples.join("bench.toml")).unwrap();
        cfg.workers = workers;
        let report = run_benchmark(&cfg).unwrap();
        report.write_artifacts(dir.path(), None).unwrap();
        outputs.push((
            fs::read(dir.path().join("report.csv")).unwrap(),
            fs::read(dir.path().join("summary.csv")).unwrap(),
        ));
    }
    let rows = String::from_utf8_lossy(&outputs[0].0).lines().count() - 1;
    check(
        outputs[0] == outputs[1] && rows > 0,
        format!(
            "{rows} report rows; report.csv identical: {}, summary.csv identical: {}",
            outputs[0].0 == outputs[1].0,
            outputs[0].1 == outputs[1].1
        ),
    )
}

fn main() {
    let samples = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/samples");
    let samples = samples.as_path();
    // criterion 4 runs after the others so it sees every fitted model
    let order: Vec<Criterion> = vec![
        (1, "aggregation axioms", Box::new(criterion_1)),
        (2, "scoring oracle", Box::new(criterion_2)),
        (3, "dominance oracle", Box::new(criterion_3)),
        (5, "solver oracle", Box::new(criterion_5)),
        (6, "kendall oracle", Box::new(criterion_6)),
        (7, "synthetic ordering", Box::new(criterion_7)),
        (8, "sensitivity", Box::new(move || criterion_8(samples))),
        (9, "unsupervised contract", Box::new(move || criterion_9(samples))),
        (10, "determinism", Box::new(move || criterion_10(samples))),
        (4, "weight simplex", Box::new(criterion_4)),
    ];
    let mut results: Vec<(u32, &str, Outcome)> = order
        .into_iter()
        .map(|(id, name, f)| (id, name, f()))
        .collect();
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({name}): {detail}");
            }
        }
    }
    println!("info: sensitivity on bundled samples: {}", criterion_8_samples(samples));
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
