use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aggeval::bench::{run_benchmark, summarize, BenchmarkConfig, EvaluationReport};
use aggeval::metrics::{evaluate, Measure};
use aggeval::model_file::ModelFile;
use aggeval::{
    fit, fit_unsupervised, load_csv, AggregationModel, ApproachKind, Dataset, DatasetConfig,
    DominanceConfig, Error, FitConfig, MinMaxScaler, ResponseColumn,
};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aggeval", version, about = "Fit and benchmark aggregation functions on tabular data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one approach on a CSV file and save the model
    Fit(FitArgs),
    /// Apply a saved model to a CSV file
    Predict(PredictArgs),
    /// Fit approaches on one CSV file and print their measures
    Evaluate(EvaluateArgs),
    /// Run every approach on every dataset of a benchmark config
    Bench(BenchArgs),
    /// Print the summary table of a saved report.json
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct CsvArgs {
    /// Response column, by header name or 0-based index
    #[arg(long)]
    response: Option<String>,
    /// Comma-separated columns to ignore
    #[arg(long, value_delimiter = ',')]
    drop: Vec<String>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// The file has no header row
    #[arg(long)]
    no_header: bool,
}

impl CsvArgs {
    fn config(&self, path: &Path) -> DatasetConfig {
        let mut cfg = DatasetConfig::new(path)
            .with_drop_columns(self.drop.iter().cloned())
            .with_delimiter(self.delimiter);
        cfg.has_header = !self.no_header;
        if let Some(r) = &self.response {
            cfg = cfg.with_response(ResponseColumn::Name(r.clone()));
        }
        cfg
    }
}

#[derive(Args)]
struct FitOptions {
    /// Seed for dominance subsampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Row count above which dominance ranks are estimated from a subsample
    #[arg(long, default_value_t = 20_000)]
    dominance_cap: usize,
    /// Always compute dominance ranks over all rows
    #[arg(long)]
    exact_dominance: bool,
}

impl FitOptions {
    fn config(&self) -> FitConfig {
        FitConfig {
            dominance: DominanceConfig {
                cap: (!self.exact_dominance).then_some(self.dominance_cap),
                seed: self.seed,
            },
            ..FitConfig::default()
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// PROD, MIN, MAX, SUM, WPM, WSM or REG
    kind: ApproachKind,
    data: PathBuf,
    #[command(flatten)]
    csv: CsvArgs,
    #[command(flatten)]
    fit: FitOptions,
    /// Use the inputs as they are instead of min-max scaling them
    #[arg(long)]
    no_scale: bool,
    /// Model file to write
    #[arg(short, long, default_value = "model.json")]
    output: PathBuf,
    /// Also write the fitted outputs on the training rows
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    model: PathBuf,
    data: PathBuf,
    #[command(flatten)]
    csv: CsvArgs,
    /// Output file; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write a header line before the values
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    data: PathBuf,
    #[command(flatten)]
    csv: CsvArgs,
    #[command(flatten)]
    fit: FitOptions,
    /// Comma-separated approaches to evaluate
    #[arg(long, default_value = "PROD,MIN,MAX,SUM,WPM,WSM,REG")]
    approaches: String,
    /// Evaluate a saved model instead of fitting
    #[arg(long, conflicts_with = "approaches")]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    config: PathBuf,
    /// Comma-separated approaches; overrides the config
    #[arg(long)]
    approaches: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    dominance_cap: Option<usize>,
    #[arg(long)]
    exact_dominance: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Dataset family to leave out of the second summary column
    #[arg(long)]
    exclude_family: Option<String>,
}

#[derive(Args)]
struct SummarizeArgs {
    report: PathBuf,
    #[arg(long)]
    exclude_family: Option<String>,
    /// Write summary.csv to this path
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Summarize(a) => cmd_summarize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path, csv: &CsvArgs) -> anyhow::Result<Dataset> {
    let cfg = csv.config(path);
    let d = load_csv::<f64>(&cfg).with_context(|| format!("loading {}", path.display()))?;
    if d.provenance().rows_removed > 0 {
        log::warn!(
            "{}: removed {} rows with missing values",
            path.display(),
            d.provenance().rows_removed
        );
    }
    Ok(d)
}

fn write_values(path: Option<&Path>, header: Option<&str>, values: &[f64]) -> anyhow::Result<()> {
    let mut out = String::with_capacity(values.len() * 20);
    if let Some(h) = header {
        out.push_str(h);
        out.push('\n');
    }
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    match path {
        Some(p) => fs::write(p, out).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().lock().write_all(out.as_bytes())?,
    }
    Ok(())
}

fn fit_model(kind: ApproachKind, d: &Dataset, cfg: &FitConfig) -> aggeval::Result<AggregationModel> {
    if kind.is_supervised() {
        fit(kind, d, cfg)
    } else {
        fit_unsupervised(kind, d.inputs(), cfg)
    }
}

fn cmd_fit(a: FitArgs) -> anyhow::Result<()> {
    let raw = load(&a.data, &a.csv)?;
    let (data, scaler) = if a.no_scale {
        (raw.clone(), None)
    } else {
        let s = MinMaxScaler::fit(&raw);
        for (i, name) in raw.column_names().iter().enumerate() {
            if !s.kept.contains(&i) {
                log::warn!("dropping constant column '{name}'");
            }
        }
        (s.apply(&raw)?, Some(s))
    };
    let model = fit_model(a.kind, &data, &a.fit.config())?;
    let mut file = ModelFile::new(model, data.column_names().to_vec(), scaler);
    file.response = data.response_name().map(str::to_string);
    file.save(&a.output)?;

    println!("{} fitted on {} rows, k = {}", a.kind, data.n(), data.k());
    if let Some(w) = file.model.weights() {
        for (name, w) in data.column_names().iter().zip(w) {
            println!("  {name:<24} {w:.6}");
        }
    }
    if let Some(p) = &a.predictions {
        let outputs = file.model.predict_all(data.inputs())?;
        write_values(Some(p), None, &outputs)?;
    }
    println!("model written to {}", a.output.display());
    Ok(())
}

fn prepare(file: &ModelFile, raw: &Dataset) -> anyhow::Result<Dataset> {
    let expected = match &file.scaler {
        Some(s) => s.source_columns.len(),
        None => file.model.k(),
    };
    if raw.k() != expected {
        return Err(Error::ArityMismatch {
            expected,
            got: raw.k(),
        })
        .context("input columns do not match the model");
    }
    Ok(match &file.scaler {
        Some(s) => s.apply(raw)?,
        None => raw.clone(),
    })
}

fn cmd_predict(a: PredictArgs) -> anyhow::Result<()> {
    let file = ModelFile::load(&a.model)?;
    let data = prepare(&file, &load(&a.data, &a.csv)?)?;
    let outputs = file.model.predict_all(data.inputs())?;
    let header = a.header.then(|| file.model.kind().to_string());
    write_values(a.output.as_deref(), header.as_deref(), &outputs)
}

fn cmd_evaluate(a: EvaluateArgs) -> anyhow::Result<()> {
    let raw = load(&a.data, &a.csv)?;
    let mut rows = Vec::new();
    if let Some(path) = &a.model {
        let file = ModelFile::load(path)?;
        let data = prepare(&file, &raw)?;
        let outputs = file.model.predict_all(data.inputs())?;
        rows.push((file.model.kind(), evaluate(&outputs, data.inputs(), data.response())?));
    } else {
        let data = aggeval::minmax_scale(&raw)?;
        let cfg = a.fit.config();
        for kind in ApproachKind::parse_list(&a.approaches)? {
            let model = match fit_model(kind, &data, &cfg) {
                Ok(m) => m,
                Err(e) => {
                    log::warn!("{kind}: {e}");
                    continue;
                }
            };
            let outputs = model.predict_all(data.inputs())?;
            rows.push((kind, evaluate(&outputs, data.inputs(), data.response())?));
        }
    }
    print!("{:<6}", "");
    for m in Measure::ALL {
        print!(" {:>16}", m.name());
    }
    println!();
    for (kind, ms) in rows {
        print!("{:<6}", kind.name());
        for m in Measure::ALL {
            print!(" {:>16.4}", ms.get(m));
        }
        let flags: Vec<_> = ms.flags.iter().map(|f| f.as_str()).collect();
        if !flags.is_empty() {
            print!("  [{}]", flags.join(";"));
        }
        println!();
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<()> {
    let mut cfg = BenchmarkConfig::from_path(&a.config)?;
    if let Some(s) = &a.approaches {
        cfg.approaches = ApproachKind::parse_list(s)?;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(c) = a.dominance_cap {
        cfg.dominance_cap = c;
    }
    cfg.exact_dominance |= a.exact_dominance;
    if let Some(d) = a.output_dir {
        cfg.output_dir = d;
    }
    if a.exclude_family.is_some() {
        cfg.exclude_family = a.exclude_family;
    }

    let report = match run_benchmark(&cfg) {
        Ok(r) => r,
        Err(Error::NoUsableDatasets) => bail!("no dataset could be loaded"),
        Err(e) => return Err(e.into()),
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    report.write_artifacts(&cfg.output_dir, cfg.exclude_family.as_deref())?;
    let summary = summarize(&report, cfg.exclude_family.as_deref())?;
    print!("{}", summary.to_text());
    println!("results written to {}", cfg.output_dir.display());
    Ok(())
}

fn cmd_summarize(a: SummarizeArgs) -> anyhow::Result<()> {
    let report = EvaluationReport::load_json(&a.report)?;
    let summary = summarize(&report, a.exclude_family.as_deref())?;
    if let Some(p) = &a.output {
        summary.write_csv(p)?;
    }
    print!("{}", summary.to_text());
    Ok(())
}
