//! Batch front end for the basketstats library.
//!
//! One command per process: ingest raw exports, summarize datasets,
//! estimate metric standard errors, trace bootstrap-to-vanilla ratios
//! over expanding windows, evaluate power and coverage under SE
//! understatement, and drive the synthetic A/A / A/B harness. Seeds are
//! explicit everywhere randomness is involved, so every run can be
//! reproduced from its manifest.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use basketstats::delta::delta_se_for_metric;
use basketstats::inference::{coverage_under_inflation, power, CoverageQuery, PowerQuery};
use basketstats::ingest::{
    export_generic_csv, parse_generic, parse_olist, parse_uci, summarize, CleaningReport,
    ColumnMapping, DatasetSummary, CUSTOMERS_FILE, ITEMS_FILE, ORDERS_FILE,
};
use basketstats::model::{responses_for_metric, vanilla_se};
use basketstats::resampling::{
    bootstrap_se, trajectory, BootstrapConfig, BootstrapMode, DEFAULT_B, DEFAULT_CV_BATCHES,
};
use basketstats::simulation::{generate, run_aa, run_ab, HarnessKind, HarnessResult, SynthConfig};
use basketstats::{Dataset, Error, MetricKind, SeEstimate, SeMethod};

use output::{cell, csv_rows, csv_single, json_pretty, json_string, BoxError, Run};

/// Decision-metric standard errors under user-clustered dependence.
#[derive(Parser)]
#[command(name = "basketstats", version, about)]
struct Cli {
    /// Cap the worker-thread pool; results are identical at any setting
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a raw export into the generic transaction CSV
    Ingest(IngestArgs),
    /// Summarize a generic transaction CSV
    Summary(SummaryArgs),
    /// Standard error of a decision metric under a chosen estimator
    Se(SeArgs),
    /// Bootstrap-to-vanilla SE ratios over expanding time windows
    Trajectory(TrajectoryArgs),
    /// Two-sided test power when the standard error is understated
    Power(PowerArgs),
    /// Confidence-interval coverage when the standard error is understated
    Coverage(CoverageArgs),
    /// Generate a synthetic user-clustered transaction dataset
    Simulate(SimulateArgs),
    /// Simulated A/A experiments: per-method CI coverage of the true zero
    Aa(HarnessArgs),
    /// Simulated A/B experiments: per-method rejection rate
    Ab(AbArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl FormatArg {
    fn token(self) -> &'static str {
        match self {
            FormatArg::Json => "json",
            FormatArg::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AdapterArg {
    Uci,
    Olist,
    Generic,
}

impl AdapterArg {
    fn token(self) -> &'static str {
        match self {
            AdapterArg::Uci => "uci",
            AdapterArg::Olist => "olist",
            AdapterArg::Generic => "generic",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Abv,
    Abs,
    Asp,
}

impl MetricArg {
    fn kind(self) -> MetricKind {
        match self {
            MetricArg::Abv => MetricKind::Abv,
            MetricArg::Abs => MetricKind::Abs,
            MetricArg::Asp => MetricKind::Asp,
        }
    }

    fn token(self) -> &'static str {
        match self {
            MetricArg::Abv => "abv",
            MetricArg::Abs => "abs",
            MetricArg::Asp => "asp",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// sqrt(s^2 / n), correct only for independent responses
    Vanilla,
    /// One-way Poisson bootstrap over user clusters
    Boot1,
    /// Multi-way Poisson bootstrap over users and products (asp only)
    Boot2,
    /// Delta-method SE for per-basket quotient metrics (abv, abs)
    Delta,
}

impl MethodArg {
    fn se_method(self) -> SeMethod {
        match self {
            MethodArg::Vanilla => SeMethod::Vanilla,
            MethodArg::Boot1 => SeMethod::BootstrapOneWay,
            MethodArg::Boot2 => SeMethod::BootstrapMultiWay,
            MethodArg::Delta => SeMethod::Delta,
        }
    }

    fn token(self) -> &'static str {
        match self {
            MethodArg::Vanilla => "vanilla",
            MethodArg::Boot1 => "boot1",
            MethodArg::Boot2 => "boot2",
            MethodArg::Delta => "delta",
        }
    }
}

#[derive(Args)]
struct SinkArgs {
    /// Output format; each command defaults to its natural one
    #[arg(long, value_enum, value_name = "FMT")]
    format: Option<FormatArg>,
    /// Write the primary output to FILE plus a FILE.manifest.json run record
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// Source schema
    #[arg(long, value_enum)]
    adapter: AdapterArg,
    /// Raw CSV (uci, generic) or collection directory (olist)
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Column-mapping JSON, generic adapter only
    #[arg(long, value_name = "FILE")]
    mapping: Option<PathBuf>,
    /// Destination for the normalized CSV
    #[arg(long, value_name = "PATH")]
    output: PathBuf,
    /// Cleaning-report format
    #[arg(long, value_enum, value_name = "FMT")]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SummaryArgs {
    /// Generic transaction CSV
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    #[command(flatten)]
    sink: SinkArgs,
}

#[derive(Args)]
struct SeArgs {
    /// Generic transaction CSV
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Decision metric
    #[arg(long, value_enum)]
    metric: MetricArg,
    /// SE estimator
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Bootstrap resamples; 500 to 1000 works well
    #[arg(long, default_value_t = DEFAULT_B, value_name = "N")]
    b: usize,
    /// Master seed, required for bootstrap methods
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Restrict to the first FRAC of the dataset's time span
    #[arg(long, default_value_t = 1.0, value_name = "FRAC")]
    window_frac: f64,
    #[command(flatten)]
    sink: SinkArgs,
}

#[derive(Args)]
struct TrajectoryArgs {
    /// Generic transaction CSV
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Decision metric
    #[arg(long, value_enum)]
    metric: MetricArg,
    /// Number of expanding windows (at least 2)
    #[arg(long, value_name = "K")]
    points: usize,
    /// Bootstrap resamples per window; 500 to 1000 works well
    #[arg(long, default_value_t = DEFAULT_B, value_name = "N")]
    b: usize,
    /// Master seed
    #[arg(long, value_name = "S")]
    seed: u64,
    #[command(flatten)]
    sink: SinkArgs,
}

#[derive(Args)]
struct PowerArgs {
    /// Two-sided test size
    #[arg(long, value_name = "A")]
    alpha: f64,
    /// True effect in units of the reported standard error
    #[arg(long, value_name = "X")]
    theta_over_se: f64,
    /// Degrees of freedom; inf runs the normal test
    #[arg(long, default_value_t = f64::INFINITY, value_name = "NU")]
    df: f64,
    /// SE understatement multiples to evaluate
    #[arg(long, value_delimiter = ',', default_value = "1", value_name = "LIST")]
    multiples: Vec<f64>,
    #[command(flatten)]
    sink: SinkArgs,
}

#[derive(Args)]
struct CoverageArgs {
    /// Nominal confidence level of the interval
    #[arg(long, value_name = "L")]
    nominal: f64,
    /// Factor by which the true SE exceeds the reported one
    #[arg(long, value_name = "M")]
    multiple: f64,
    /// Degrees of freedom; inf runs the normal test
    #[arg(long, default_value_t = f64::INFINITY, value_name = "NU")]
    df: f64,
    #[command(flatten)]
    sink: SinkArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Synthetic-population config JSON
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the config's master seed
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    #[command(flatten)]
    sink: SinkArgs,
}

#[derive(Args)]
struct HarnessArgs {
    /// Synthetic-population config JSON
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Simulated experiments to run (at least 100)
    #[arg(long, value_name = "R")]
    reps: usize,
    /// Override the config's master seed
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Decision metric under test
    #[arg(long, value_enum, default_value = "abv")]
    metric: MetricArg,
    /// SE estimators to evaluate
    #[arg(long, value_enum, value_delimiter = ',', default_value = "vanilla,boot1")]
    methods: Vec<MethodArg>,
    /// Bootstrap resamples per arm; 500 to 1000 works well
    #[arg(long, default_value_t = DEFAULT_B, value_name = "N")]
    b: usize,
    /// Two-sided test size
    #[arg(long, default_value_t = 0.05, value_name = "A")]
    alpha: f64,
    #[command(flatten)]
    sink: SinkArgs,
}

#[derive(Args)]
struct AbArgs {
    #[command(flatten)]
    base: HarnessArgs,
    /// Multiplicative lift applied to treatment unit prices
    #[arg(long, value_name = "E")]
    effect: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Caps parallelism only; resamples and replications are collected
        // in index order, so the pool size never changes a result.
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        if let Err(e) = pool {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let started = Instant::now();
    let outcome = run(cli.command, cli.threads).and_then(|r| output::deliver(r, started.elapsed()));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, threads: Option<usize>) -> Result<Run, BoxError> {
    let mut run = match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Summary(args) => cmd_summary(args),
        Command::Se(args) => cmd_se(args),
        Command::Trajectory(args) => cmd_trajectory(args),
        Command::Power(args) => cmd_power(args),
        Command::Coverage(args) => cmd_coverage(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Aa(args) => cmd_harness(args, None),
        Command::Ab(args) => cmd_harness(args.base, Some(args.effect)),
    }?;
    if let (Some(n), serde_json::Value::Object(map)) = (threads, &mut run.params) {
        map.insert("threads".into(), json!(n));
    }
    Ok(run)
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, BoxError> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn cmd_ingest(args: IngestArgs) -> Result<Run, BoxError> {
    if args.mapping.is_some() && !matches!(args.adapter, AdapterArg::Generic) {
        return Err(
            Error::InvalidConfig("--mapping applies only to the generic adapter".into()).into(),
        );
    }
    let mapping = match &args.mapping {
        Some(path) => load_json::<ColumnMapping>(path)?,
        None => ColumnMapping::default(),
    };
    let (dataset, report) = match args.adapter {
        AdapterArg::Uci => parse_uci(&args.input)?,
        AdapterArg::Olist => parse_olist(&args.input)?,
        AdapterArg::Generic => parse_generic(&args.input, &mapping)?,
    };
    let mut primary = Vec::new();
    export_generic_csv(&dataset, &mut primary)?;

    let format = args.format.unwrap_or(FormatArg::Json);
    let report_text = match format {
        FormatArg::Json => json_string(&report)?,
        FormatArg::Csv => report_csv(&report),
    };
    let mut inputs = match args.adapter {
        AdapterArg::Olist => vec![
            args.input.join(CUSTOMERS_FILE),
            args.input.join(ORDERS_FILE),
            args.input.join(ITEMS_FILE),
        ],
        _ => vec![args.input.clone()],
    };
    if let Some(mapping_path) = &args.mapping {
        inputs.push(mapping_path.clone());
    }

    Ok(Run {
        command: "ingest",
        params: json!({
            "adapter": args.adapter.token(),
            "input": args.input.display().to_string(),
            "mapping": args.mapping.as_ref().map(|p| p.display().to_string()),
            "output": args.output.display().to_string(),
            "format": format.token(),
        }),
        seeds: Vec::new(),
        inputs,
        primary,
        output: Some(args.output),
        stdout_extra: Some(report_text),
    })
}

fn report_csv(report: &CleaningReport) -> String {
    let s = &report.summary;
    format!(
        "rows_read,rows_kept,dropped_missing_user,dropped_cancelled,\
         dropped_non_positive_quantity,dropped_non_positive_price,\
         users,transactions,units,products,span_days\n\
         {},{},{},{},{},{},{},{},{},{},{}\n",
        report.rows_read,
        report.rows_kept,
        report.dropped_missing_user,
        report.dropped_cancelled,
        report.dropped_non_positive_quantity,
        report.dropped_non_positive_price,
        s.users,
        s.transactions,
        s.units,
        s.products,
        s.span_days,
    )
}

fn cmd_summary(args: SummaryArgs) -> Result<Run, BoxError> {
    let (dataset, _) = parse_generic(&args.input, &ColumnMapping::default())?;
    let summary = summarize(&dataset)?;
    let format = args.sink.format.unwrap_or(FormatArg::Json);
    let primary = match format {
        FormatArg::Json => json_pretty(&summary)?,
        FormatArg::Csv => summary_csv(&summary),
    };
    Ok(Run {
        command: "summary",
        params: json!({
            "input": args.input.display().to_string(),
            "format": format.token(),
        }),
        seeds: Vec::new(),
        inputs: vec![args.input],
        primary,
        output: args.sink.output,
        stdout_extra: None,
    })
}

fn summary_csv(summary: &DatasetSummary) -> Vec<u8> {
    csv_single(
        "users,transactions,units,products,span_days",
        &[
            summary.users.to_string(),
            summary.transactions.to_string(),
            summary.units.to_string(),
            summary.products.to_string(),
            summary.span_days.to_string(),
        ],
    )
}

fn cmd_se(args: SeArgs) -> Result<Run, BoxError> {
    let frac = args.window_frac;
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::InvalidProbability { name: "window-frac", value: frac }.into());
    }
    let (dataset, _) = parse_generic(&args.input, &ColumnMapping::default())?;
    let window = dataset.window_fraction(frac)?;
    let metric = args.metric.kind();
    let sample = responses_for_metric(&dataset, metric, window)?;
    let vanilla = vanilla_se(&sample)?;

    let mut seeds = Vec::new();
    let bootstrap = matches!(args.method, MethodArg::Boot1 | MethodArg::Boot2);
    let estimate = match args.method {
        MethodArg::Vanilla => vanilla.clone(),
        MethodArg::Boot1 | MethodArg::Boot2 => {
            let seed = args.seed.ok_or_else(|| {
                Error::InvalidConfig("bootstrap methods need an explicit --seed".into())
            })?;
            seeds.push(seed);
            let mode = match args.method {
                MethodArg::Boot1 => BootstrapMode::OneWay,
                _ => BootstrapMode::MultiWay,
            };
            let config = BootstrapConfig::new(args.b, seed, mode, DEFAULT_CV_BATCHES)?;
            bootstrap_se(&sample, &config)?.with_ratio_to(vanilla.se)
        }
        MethodArg::Delta => {
            delta_se_for_metric(&dataset, metric, window)?.with_ratio_to(vanilla.se)
        }
    };

    let format = args.sink.format.unwrap_or(FormatArg::Json);
    let primary = match format {
        FormatArg::Json => json_pretty(&estimate)?,
        FormatArg::Csv => se_csv(&estimate),
    };
    Ok(Run {
        command: "se",
        params: json!({
            "input": args.input.display().to_string(),
            "metric": args.metric.token(),
            "method": args.method.token(),
            "b": if bootstrap { json!(args.b) } else { json!(null) },
            "seed": if bootstrap { json!(args.seed) } else { json!(null) },
            "window_frac": frac,
            "format": format.token(),
        }),
        seeds,
        inputs: vec![args.input],
        primary,
        output: args.sink.output,
        stdout_extra: None,
    })
}

fn se_csv(estimate: &SeEstimate) -> Vec<u8> {
    csv_single(
        "se,method,b,cv,ratio_to_vanilla,seed",
        &[
            estimate.se.to_string(),
            estimate.method.to_string(),
            cell(&estimate.b),
            cell(&estimate.cv),
            cell(&estimate.ratio_to_vanilla),
            cell(&estimate.seed),
        ],
    )
}

fn cmd_trajectory(args: TrajectoryArgs) -> Result<Run, BoxError> {
    let (dataset, _) = parse_generic(&args.input, &ColumnMapping::default())?;
    let config = BootstrapConfig::one_way(args.b, args.seed)?;
    let points = trajectory(&dataset, args.metric.kind(), args.points, &config)?;
    let format = args.sink.format.unwrap_or(FormatArg::Csv);
    let primary = match format {
        FormatArg::Csv => csv_rows(&points)?,
        FormatArg::Json => json_pretty(&points)?,
    };
    Ok(Run {
        command: "trajectory",
        params: json!({
            "input": args.input.display().to_string(),
            "metric": args.metric.token(),
            "points": args.points,
            "b": args.b,
            "seed": args.seed,
            "format": format.token(),
        }),
        seeds: vec![args.seed],
        inputs: vec![args.input],
        primary,
        output: args.sink.output,
        stdout_extra: None,
    })
}

#[derive(Serialize)]
struct PowerRow {
    multiple: f64,
    alpha: f64,
    power: f64,
}

fn cmd_power(args: PowerArgs) -> Result<Run, BoxError> {
    let mut rows = Vec::with_capacity(args.multiples.len());
    for &multiple in &args.multiples {
        // The reported SE understates the truth by `multiple`, so the
        // standardized effect the test actually sees shrinks by it.
        let query = PowerQuery::new(args.theta_over_se, multiple, args.alpha, args.df)?;
        rows.push(PowerRow {
            multiple,
            alpha: args.alpha,
            power: power(&query)?,
        });
    }
    let format = args.sink.format.unwrap_or(FormatArg::Csv);
    let primary = match format {
        FormatArg::Csv => csv_rows(&rows)?,
        FormatArg::Json => json_pretty(&rows)?,
    };
    Ok(Run {
        command: "power",
        params: json!({
            "alpha": args.alpha,
            "theta_over_se": args.theta_over_se,
            "df": df_json(args.df),
            "multiples": args.multiples,
            "format": format.token(),
        }),
        seeds: Vec::new(),
        inputs: Vec::new(),
        primary,
        output: args.sink.output,
        stdout_extra: None,
    })
}

#[derive(Serialize)]
struct CoverageRow {
    multiple: f64,
    nominal: f64,
    coverage: f64,
}

fn cmd_coverage(args: CoverageArgs) -> Result<Run, BoxError> {
    let query = CoverageQuery::new(args.multiple, args.nominal, args.df)?;
    let row = CoverageRow {
        multiple: args.multiple,
        nominal: args.nominal,
        coverage: coverage_under_inflation(&query)?,
    };
    let format = args.sink.format.unwrap_or(FormatArg::Csv);
    let primary = match format {
        FormatArg::Csv => csv_rows(std::slice::from_ref(&row))?,
        FormatArg::Json => json_pretty(&row)?,
    };
    Ok(Run {
        command: "coverage",
        params: json!({
            "nominal": args.nominal,
            "multiple": args.multiple,
            "df": df_json(args.df),
            "format": format.token(),
        }),
        seeds: Vec::new(),
        inputs: Vec::new(),
        primary,
        output: args.sink.output,
        stdout_extra: None,
    })
}

/// Infinity means the normal test and has no JSON number form.
fn df_json(nu: f64) -> serde_json::Value {
    if nu.is_finite() {
        json!(nu)
    } else {
        json!("inf")
    }
}

#[derive(Serialize)]
struct ItemRow<'a> {
    user_id: &'a str,
    transaction_id: &'a str,
    product_id: &'a str,
    unit_price: f64,
    quantity: u32,
    timestamp: String,
}

fn dataset_rows(dataset: &Dataset) -> Vec<ItemRow<'_>> {
    dataset
        .items()
        .iter()
        .map(|item| ItemRow {
            user_id: dataset.users().name(item.user.0),
            transaction_id: dataset.txn_ids().name(item.transaction.0),
            product_id: dataset.products().name(item.product.0),
            unit_price: item.unit_price,
            quantity: item.quantity,
            timestamp: item.timestamp.format("%Y-%m-%dT%H:%M:%S").to_string(),
        })
        .collect()
}

fn cmd_simulate(args: SimulateArgs) -> Result<Run, BoxError> {
    let mut config: SynthConfig = load_json(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    let dataset = generate(&config)?;
    let format = args.sink.format.unwrap_or(FormatArg::Csv);
    let primary = match format {
        FormatArg::Csv => {
            let mut bytes = Vec::new();
            export_generic_csv(&dataset, &mut bytes)?;
            bytes
        }
        FormatArg::Json => json_pretty(&dataset_rows(&dataset))?,
    };
    Ok(Run {
        command: "simulate",
        params: json!({
            "config": args.config.display().to_string(),
            "resolved": serde_json::to_value(&config)?,
            "format": format.token(),
        }),
        seeds: vec![config.seed],
        inputs: vec![args.config],
        primary,
        output: args.sink.output,
        stdout_extra: None,
    })
}

fn cmd_harness(args: HarnessArgs, effect: Option<f64>) -> Result<Run, BoxError> {
    let mut config: SynthConfig = load_json(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let methods: Vec<SeMethod> = args.methods.iter().map(|m| m.se_method()).collect();
    let metric = args.metric.kind();
    let result = match effect {
        None => run_aa(&config, args.reps, metric, &methods, args.b, args.alpha)?,
        Some(effect) => {
            run_ab(&config, args.reps, metric, effect, &methods, args.b, args.alpha)?
        }
    };
    let format = args.sink.format.unwrap_or(FormatArg::Json);
    let primary = match format {
        FormatArg::Json => json_pretty(&result)?,
        FormatArg::Csv => harness_csv(&result),
    };
    Ok(Run {
        command: if effect.is_none() { "aa" } else { "ab" },
        params: json!({
            "config": args.config.display().to_string(),
            "resolved": serde_json::to_value(&config)?,
            "reps": args.reps,
            "metric": args.metric.token(),
            "methods": args.methods.iter().map(|m| m.token()).collect::<Vec<_>>(),
            "b": args.b,
            "alpha": args.alpha,
            "effect": effect,
            "format": format.token(),
        }),
        seeds: vec![config.seed],
        inputs: vec![args.config],
        primary,
        output: args.sink.output,
        stdout_extra: None,
    })
}

fn harness_csv(result: &HarnessResult) -> Vec<u8> {
    use std::fmt::Write as _;
    let kind = match result.kind {
        HarnessKind::Aa => "aa",
        HarnessKind::Ab => "ab",
    };
    let mut text =
        String::from("kind,metric,replications,alpha,effect,b,seed,method,rate,rate_se,mean_se\n");
    for outcome in &result.outcomes {
        let _ = writeln!(
            text,
            "{kind},{},{},{},{},{},{},{},{},{},{}",
            result.metric,
            result.replications,
            result.alpha,
            result.effect,
            result.b,
            result.seed,
            outcome.method,
            outcome.rate,
            outcome.rate_se,
            outcome.mean_se,
        );
    }
    text.into_bytes()
}
