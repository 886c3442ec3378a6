//! Single entry point exposing the whole pipeline: dataset statistics,
//! difficulty evaluation, sweeps, combination bounds, model ranking, the
//! transport scaling experiment and the toy Monte Carlo check.
//!
//! Exit codes: 0 success, 2 I/O or format errors, 3 estimator degeneracy or
//! resolution errors, 4 invalid specs. Structured outputs are byte-identical
//! across runs for a fixed configuration and seed.

use bias_gauge::difficulty::{self, MetaTaskSpec, SweepParam, TaskSpec};
use bias_gauge::estimators::LabeledDataset;
use bias_gauge::ingest::{self, DeltaMode, LabelColumn, PixelScale, ScalingRecord};
use bias_gauge::numerics::LogScalar;
use bias_gauge::sandbox;
use bias_gauge::transport::{scaling_experiment, ScalingConfig};
use bias_gauge::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bias-gauge", version, about = "Task difficulty from dataset statistics")]
struct Cli {
    /// Worker thread cap (falls back to BIAS_GAUGE_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate n, r, intrinsic dimension and class margin from a dataset.
    Stats(StatsArgs),
    /// Evaluate the difficulty of a task spec (JSON file or RL flags).
    Difficulty(DifficultyArgs),
    /// Evaluate difficulty along one swept parameter.
    Sweep(SweepArgs),
    /// Lower/upper difficulty bounds for solving two tasks jointly.
    Combine(CombineArgs),
    /// Rank model architectures by the information their error rate implies.
    Rank(RankArgs),
    /// Exact-transport scaling experiment (distance decay against n).
    ValidateWasserstein(ValidateArgs),
    /// Monte Carlo check of the difficulty definition on a toy task.
    Sandbox(SandboxArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Idx,
    Cifar10,
    Csv,
}

#[derive(Args)]
struct StatsArgs {
    /// Input file(s): IDX image file, CIFAR-10 batches, or a CSV matrix.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    format: DataFormat,
    /// IDX label file (required for --format idx).
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value = "unit")]
    scale: String,
    /// CSV label column (index or header name).
    #[arg(long)]
    label_column: Option<String>,
    /// Neighbor count for the dimension estimate.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Anchor subsample size for the dimension estimate.
    #[arg(long)]
    anchors: Option<usize>,
    #[arg(long, default_value = "auto")]
    delta_mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    output: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DifficultyArgs {
    /// Task spec JSON (kind/m/n/d/z/r/delta/b/eps_over_l).
    #[arg(long, conflicts_with_all = ["meta_spec", "rl"])]
    spec: Option<PathBuf>,
    /// Meta-learning spec JSON (ways/shots_per_letter/alphabet_sizes/inner/m1/eps_over_l).
    #[arg(long, conflicts_with = "rl")]
    meta_spec: Option<PathBuf>,
    /// Evaluate an RL task from flags instead of a spec file.
    #[arg(long)]
    rl: bool,
    #[arg(long, requires = "rl")]
    m: Option<u64>,
    #[arg(long, requires = "rl")]
    delta: Option<f64>,
    #[arg(long, requires = "rl")]
    n: Option<f64>,
    #[arg(long, requires = "rl")]
    d: Option<u64>,
    #[arg(long, requires = "rl")]
    eps: Option<f64>,
    /// Override the spec's kind before evaluation.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    output: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    /// One of n, eps, m, d, delta.
    #[arg(long)]
    param: String,
    /// Comma-separated parameter values.
    #[arg(long)]
    values: String,
    #[arg(long, value_enum, default_value = "csv")]
    output: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CombineArgs {
    spec_a: PathBuf,
    spec_b: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    output: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    spec: PathBuf,
    /// CSV with columns name,error_rate.
    #[arg(long)]
    errors: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    output: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Comma-separated sphere dimensions.
    #[arg(long, default_value = "3")]
    m: String,
    /// Comma-separated sample sizes.
    #[arg(long, default_value = "10,25,50,100,250,500")]
    n: String,
    /// Reference cloud size (must exceed every n).
    #[arg(long = "ref", default_value_t = 2000)]
    ref_size: usize,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Distances CSV path; the fit CSV lands next to it with a _fit suffix.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SandboxArgs {
    /// Frequency cutoff K of the toy basis.
    #[arg(long)]
    k: u64,
    /// Training points (at most 2K+1).
    #[arg(long)]
    n: usize,
    /// Parameter ball radius.
    #[arg(long)]
    b: f64,
    /// Generalization error threshold.
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io { .. }
        | Error::BadMagic { .. }
        | Error::Truncated { .. }
        | Error::CountMismatch { .. }
        | Error::RecordSize { .. }
        | Error::Csv { .. } => 2,
        Error::InvalidSpec(_) => 4,
        _ => 3,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read_task_spec(path: &Path) -> Result<TaskSpec, Error> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&raw).map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidSpec(format!("bad {what} value '{tok}'")))
        })
        .collect()
}

fn run_stats(args: StatsArgs) -> Result<(), Error> {
    let scale: PixelScale = args.scale.parse()?;
    let delta_mode: DeltaMode = args.delta_mode.parse()?;
    let (data, scaling): (LabeledDataset, ScalingRecord) = match args.format {
        DataFormat::Idx => {
            let labels = args
                .labels
                .as_ref()
                .ok_or_else(|| Error::InvalidSpec("--format idx requires --labels".into()))?;
            let data = ingest::read_idx(&args.input[0], labels, scale)?;
            (
                data,
                ScalingRecord {
                    pixel_scale: Some(scale),
                    notes: vec!["idx pixels".into()],
                },
            )
        }
        DataFormat::Cifar10 => {
            let data = ingest::read_cifar10_bin(&args.input, scale)?;
            (
                data,
                ScalingRecord {
                    pixel_scale: Some(scale),
                    notes: vec!["cifar10 binary batches".into()],
                },
            )
        }
        DataFormat::Csv => {
            let label_col = args
                .label_column
                .as_deref()
                .map(str::parse::<LabelColumn>)
                .transpose()?;
            let data = ingest::read_csv_matrix(&args.input[0], label_col.as_ref())?;
            (
                data,
                ScalingRecord {
                    pixel_scale: None,
                    notes: vec!["csv matrix, values used as-is".into()],
                },
            )
        }
    };
    let stats = ingest::dataset_stats(&data, delta_mode, args.k, args.anchors, args.seed, scaling)?;
    let text = match args.output {
        OutputFormat::Json | OutputFormat::Csv => to_json(&stats),
        OutputFormat::Table => format!(
            "n            {}\nambient_dim  {}\nr            {:.6}\nm_hat        {:.4}\ndelta_hat    {}\nmethod       {}\nflags        {:?}\n",
            stats.n,
            stats.ambient_dim,
            stats.r,
            stats.m_hat,
            stats
                .delta_hat
                .map_or("n/a".to_string(), |d| format!("{d:.6}")),
            stats
                .delta_method
                .map_or("n/a".to_string(), |m| format!("{m:?}").to_lowercase()),
            stats.flags,
        ),
    };
    emit(&text, args.out.as_deref())
}

fn run_difficulty(args: DifficultyArgs) -> Result<(), Error> {
    let report = if args.rl {
        let missing = || Error::InvalidSpec("--rl requires --m --delta --n --d --eps".into());
        difficulty::difficulty_rl(
            args.m.ok_or_else(missing)?,
            args.delta.ok_or_else(missing)?,
            args.n.ok_or_else(missing)?,
            args.d.ok_or_else(missing)?,
            args.eps.ok_or_else(missing)?,
        )?
    } else if let Some(path) = &args.meta_spec {
        let raw = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let spec: MetaTaskSpec = serde_json::from_str(&raw)
            .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
        difficulty::difficulty_meta(&spec)?
    } else if let Some(path) = &args.spec {
        let mut spec = read_task_spec(path)?;
        if let Some(kind) = &args.kind {
            spec.kind = serde_json::from_value(serde_json::Value::String(kind.clone()))
                .map_err(|_| Error::InvalidSpec(format!("unknown kind {kind}")))?;
        }
        difficulty::evaluate(&spec)?
    } else {
        return Err(Error::InvalidSpec(
            "provide --spec, --meta-spec or --rl flags".into(),
        ));
    };

    let text = match args.output {
        OutputFormat::Json | OutputFormat::Csv => to_json(&report),
        OutputFormat::Table => format!(
            "total {} bits\n\n{}",
            report.total_bits.to_scientific(),
            report.to_table()
        ),
    };
    emit(&text, args.out.as_deref())
}

fn run_sweep(args: SweepArgs) -> Result<(), Error> {
    let spec = read_task_spec(&args.spec)?;
    let param: SweepParam = args.param.parse()?;
    let values: Vec<f64> = parse_list(&args.values, "sweep")?;
    if values.is_empty() {
        return Err(Error::InvalidSpec("no sweep values given".into()));
    }
    let points = difficulty::sweep(&spec, param, &values);
    let text = match args.output {
        OutputFormat::Json => to_json(&points),
        _ => {
            let mut s = String::from("value,log10_bits,bits,data_sufficient,error\n");
            for p in &points {
                match (&p.report, &p.error) {
                    (Some(r), _) => s.push_str(&format!(
                        "{},{},{},{},\n",
                        p.value,
                        r.total_bits.log10_mag(),
                        r.total_bits.to_scientific(),
                        r.data_sufficient
                    )),
                    (None, Some(e)) => {
                        s.push_str(&format!("{},,,,\"{}\"\n", p.value, e.replace('"', "'")))
                    }
                    _ => unreachable!(),
                }
            }
            s
        }
    };
    emit(&text, args.out.as_deref())
}

fn run_combine(args: CombineArgs) -> Result<(), Error> {
    let a = read_task_spec(&args.spec_a)?;
    let b = read_task_spec(&args.spec_b)?;
    let outcome = difficulty::combine(&a, &b)?;
    let text = match args.output {
        OutputFormat::Json | OutputFormat::Csv => to_json(&outcome),
        OutputFormat::Table => format!(
            "lower {} bits (log10 {:.4})\nupper {} bits (log10 {:.4})\ni1_aug {} bits\ni2_aug {} bits\n",
            outcome.lower.to_bits().to_scientific(),
            outcome.lower.to_bits().log10_mag(),
            outcome.upper.to_bits().to_scientific(),
            outcome.upper.to_bits().log10_mag(),
            outcome.i1_aug.total_bits.to_scientific(),
            outcome.i2_aug.total_bits.to_scientific(),
        ),
    };
    emit(&text, args.out.as_deref())
}

#[derive(Serialize)]
struct RankRow {
    name: String,
    error_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    information_bits: Option<LogScalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    log10_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn run_rank(args: RankArgs) -> Result<(), Error> {
    let spec = read_task_spec(&args.spec)?;
    let raw = fs::read_to_string(&args.errors).map_err(|source| Error::Io {
        path: args.errors.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(raw.as_bytes());
    let mut rows: Vec<RankRow> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Csv {
            row: i + 1,
            message: e.to_string(),
        })?;
        if rec.len() < 2 {
            return Err(Error::Csv {
                row: i + 1,
                message: "expected columns name,error_rate".into(),
            });
        }
        let name = rec[0].trim().to_string();
        let rate = rec[1].trim();
        if i == 0 && rate.parse::<f64>().is_err() {
            continue; // header row
        }
        let error_rate: f64 = rate.parse().map_err(|_| Error::Csv {
            row: i + 1,
            message: format!("bad error_rate '{rate}'"),
        })?;
        // per-row failures are recorded in the output; the run only fails
        // if nothing evaluates
        match difficulty::model_information(&spec, error_rate) {
            Ok(bits) => rows.push(RankRow {
                name,
                error_rate,
                log10_bits: Some(bits.log10_mag()),
                information_bits: Some(bits),
                error: None,
            }),
            Err(e) => rows.push(RankRow {
                name,
                error_rate,
                log10_bits: None,
                information_bits: None,
                error: Some(e.to_string()),
            }),
        }
    }
    if !rows.is_empty() && rows.iter().all(|r| r.error.is_some()) {
        return Err(Error::Estimation(
            "every model row failed to evaluate".into(),
        ));
    }
    rows.sort_by(|a, b| match (&a.information_bits, &b.information_bits) {
        (Some(x), Some(y)) => y.partial_cmp(x).unwrap().then(a.name.cmp(&b.name)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.name.cmp(&b.name),
    });
    let text = match args.output {
        OutputFormat::Json => to_json(&rows),
        _ => {
            let mut s = String::from("name,error_rate,information_bits,log10_bits,error\n");
            for r in &rows {
                match (&r.information_bits, &r.error) {
                    (Some(bits), _) => s.push_str(&format!(
                        "{},{},{},{},\n",
                        r.name,
                        r.error_rate,
                        bits.to_scientific(),
                        r.log10_bits.unwrap()
                    )),
                    (None, Some(e)) => s.push_str(&format!(
                        "{},{},,,\"{}\"\n",
                        r.name,
                        r.error_rate,
                        e.replace('"', "'")
                    )),
                    _ => unreachable!(),
                }
            }
            s
        }
    };
    emit(&text, args.out.as_deref())
}

fn run_validate(args: ValidateArgs) -> Result<(), Error> {
    let cfg = ScalingConfig {
        m_values: parse_list(&args.m, "m")?,
        n_values: parse_list(&args.n, "n")?,
        ref_size: args.ref_size,
        trials: args.trials,
        seed: args.seed,
    };
    let result = scaling_experiment(&cfg)?;
    let mut rows = Vec::new();
    result.write_rows_csv(&mut rows).expect("in-memory write");
    let mut fits = Vec::new();
    result.write_fits_csv(&mut fits).expect("in-memory write");
    match &args.out {
        Some(path) => {
            emit(&String::from_utf8(rows).unwrap(), Some(path))?;
            let fit_path = fit_path_for(path);
            emit(&String::from_utf8(fits).unwrap(), Some(&fit_path))?;
        }
        None => {
            let text = format!(
                "{}\n{}",
                String::from_utf8(rows).unwrap(),
                String::from_utf8(fits).unwrap()
            );
            emit(&text, None)?;
        }
    }
    Ok(())
}

fn fit_path_for(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or("out".into(), |s| s.to_string_lossy().to_string());
    let ext = path
        .extension()
        .map_or("csv".into(), |s| s.to_string_lossy().to_string());
    path.with_file_name(format!("{stem}_fit.{ext}"))
}

fn run_sandbox(args: SandboxArgs) -> Result<(), Error> {
    let task = sandbox::build_toy(args.k, args.n, args.b, args.eps, args.seed)?;
    let report = sandbox::mc_inductive_bias(&task, args.samples, args.seed)?;
    emit(&to_json(&report), args.out.as_deref())
}

fn configure_threads(cli_threads: Option<usize>) {
    let threads = cli_threads.or_else(|| {
        std::env::var("BIAS_GAUGE_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .ok();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    let result = match cli.command {
        Command::Stats(args) => run_stats(args),
        Command::Difficulty(args) => run_difficulty(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Combine(args) => run_combine(args),
        Command::Rank(args) => run_rank(args),
        Command::ValidateWasserstein(args) => run_validate(args),
        Command::Sandbox(args) => run_sandbox(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
