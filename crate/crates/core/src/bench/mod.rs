//! Benchmark harness: fit every approach on every dataset, evaluate, summarize.
//!
//! Evaluation is train-equals-test: each model is applied to the same rows it
//! was fitted on, so external measures describe agreement with the response on
//! the training data, not generalization.

mod config;
mod report;
mod summary;

use std::collections::HashSet;

use rayon::prelude::*;

pub use config::BenchmarkConfig;
pub use report::{Cell, DatasetRecord, DatasetStatus, EvaluationReport};
pub use summary::{
    correlation_matrix, quantile, summarize, BoxPlot, CorrelationMatrix, Quartiles, SummaryRow,
    SummaryTable,
};

use crate::aggregate::{fit, fit_unsupervised, AggregationModel, ApproachKind, FitConfig};
use crate::error::{Error, Result};
use crate::ingest::{load_csv, minmax_scale, Dataset, DatasetConfig};
use crate::metrics::evaluate;

/// Runs the whole benchmark. Per-dataset and per-cell failures are recorded in
/// the report; only a run where no dataset loads is an error.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<EvaluationReport> {
    config.validate()?;
    let run = || -> Vec<(DatasetRecord, Vec<Cell>, Vec<String>)> {
        config
            .datasets
            .par_iter()
            .map(|d| run_dataset(d, config))
            .collect()
    };
    let results = if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(run)
    } else {
        run()
    };

    let mut report = EvaluationReport {
        approaches: config.approaches.clone(),
        datasets: Vec::with_capacity(results.len()),
        cells: Vec::new(),
        warnings: Vec::new(),
    };
    for (record, cells, warnings) in results {
        report.datasets.push(record);
        report.cells.extend(cells);
        report.warnings.extend(warnings);
    }
    if report
        .datasets
        .iter()
        .all(|d| matches!(d.status, DatasetStatus::Failed { .. }))
    {
        return Err(Error::NoUsableDatasets);
    }
    Ok(report)
}

fn run_dataset(
    dcfg: &DatasetConfig,
    config: &BenchmarkConfig,
) -> (DatasetRecord, Vec<Cell>, Vec<String>) {
    let id = dcfg.dataset_id();
    let mut warnings = Vec::new();
    let mut record = DatasetRecord {
        id: id.clone(),
        family: dcfg.family.clone(),
        path: dcfg.path.display().to_string(),
        status: DatasetStatus::Failed {
            error: String::new(),
        },
    };

    let loaded = load_csv::<f64>(dcfg).and_then(|d| minmax_scale(&d));
    let data = match loaded {
        Ok(d) => d,
        Err(e) => {
            log::warn!("dataset {id}: {e}");
            warnings.push(format!("dataset {id}: {e}"));
            record.status = DatasetStatus::Failed {
                error: e.to_string(),
            };
            return (record, Vec::new(), warnings);
        }
    };
    for c in &data.provenance().dropped_columns {
        if c.reason != crate::ingest::DropReason::Configured {
            warnings.push(format!("dataset {id}: dropped column '{}' ({:?})", c.name, c.reason));
        }
    }
    if data.response().is_none() {
        warnings.push(format!("dataset {id}: no response column, external measures undefined"));
    }

    record.status = DatasetStatus::Loaded {
        n: data.n(),
        k: data.k(),
        rows_removed: data.provenance().rows_removed,
        dropped_columns: data.provenance().dropped_columns.clone(),
        columns: data.column_names().to_vec(),
        distinct_response_values: data.response().map(|y| {
            y.iter().map(|v| v.to_bits()).collect::<HashSet<_>>().len()
        }),
    };

    let fit_config = config.fit_config(&id);
    let cells = config
        .approaches
        .iter()
        .map(|&kind| {
            let cell = run_cell(kind, &data, &fit_config);
            if let Some(e) = &cell.error {
                warnings.push(format!("dataset {id}, {kind}: {e}"));
            }
            cell.with_dataset(&id)
        })
        .collect();
    (record, cells, warnings)
}

fn run_cell(kind: ApproachKind, data: &Dataset<f64>, fit_config: &FitConfig) -> Cell {
    let fitted: Result<AggregationModel<f64>> = if kind.is_supervised() {
        fit(kind, data, fit_config)
    } else {
        // unsupervised approaches only ever see the input matrix
        fit_unsupervised(kind, data.inputs(), fit_config)
    };
    let outcome = fitted.and_then(|model| {
        let outputs = model.predict_all(data.inputs())?;
        let measures = evaluate(&outputs, data.inputs(), data.response())?;
        Ok((model, outputs, measures))
    });
    match outcome {
        Ok((model, outputs, measures)) => Cell {
            dataset: String::new(),
            approach: kind,
            n: data.n(),
            k: data.k(),
            distinct_outputs: Some(outputs.iter().map(|v| v.to_bits()).collect::<HashSet<_>>().len()),
            weights: model.weights().map(<[f64]>::to_vec),
            measures: Some(measures),
            error: None,
        },
        Err(e) => Cell {
            dataset: String::new(),
            approach: kind,
            n: data.n(),
            k: data.k(),
            distinct_outputs: None,
            weights: None,
            measures: None,
            error: Some(e.to_string()),
        },
    }
}
