use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rangedc::bench::{self, Generator};
use rangedc::cancel::CancelToken;
use rangedc::dc::{format_dc, parse_dc, DenialConstraint};
use rangedc::discovery::{discover, DiscoveryConfig, SpaceConfig, StopReason};
use rangedc::index::Backend;
use rangedc::oracle::{brute_force_verify_with, DEFAULT_ROW_CAP};
use rangedc::relation::{ingest_csv, IngestOptions, Relation, Schema};
use rangedc::verify::{verify, NullPolicy, Verdict, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "rangedc",
    version,
    about = "Verify and discover denial constraints over CSV data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check constraints against a CSV file.
    Verify(VerifyArgs),
    /// Search for minimal constraints that hold, printing each as it is found.
    Discover(DiscoverArgs),
    /// Time verification on generated data.
    Bench(BenchArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// JSON file forcing column kinds, e.g. {"columns": {"SSN": "categorical"}}.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyBackend {
    RangeTree,
    KdTree,
    Linear,
    /// Pairwise reference check, limited to small inputs.
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexBackend {
    RangeTree,
    KdTree,
    Linear,
}

impl From<IndexBackend> for Backend {
    fn from(b: IndexBackend) -> Self {
        match b {
            IndexBackend::RangeTree => Backend::RangeTree,
            IndexBackend::KdTree => Backend::KdTree,
            IndexBackend::Linear => Backend::Linear,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NullArg {
    False,
    Drop,
}

impl From<NullArg> for NullPolicy {
    fn from(n: NullArg) -> Self {
        match n {
            NullArg::False => NullPolicy::False,
            NullArg::Drop => NullPolicy::Drop,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Constraint text, or @FILE with one constraint per line. Repeatable.
    #[arg(long, required = true)]
    dc: Vec<String>,
    #[arg(long, value_enum, default_value = "range-tree")]
    backend: VerifyBackend,
    #[arg(long, value_enum, default_value = "false")]
    null_policy: NullArg,
}

#[derive(Args)]
struct DiscoverArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 3)]
    max_level: usize,
    #[arg(long, value_enum, default_value = "kd-tree")]
    backend: IndexBackend,
    /// Stop after this many seconds and report what was found.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Comma-separated column names to draw predicates from.
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
    /// Also compare pairs of distinct columns with overlapping values.
    #[arg(long)]
    cross_column: bool,
    /// Reject candidates on a random sample of N rows first.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "false")]
    null_policy: NullArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated row counts.
    #[arg(long, value_delimiter = ',', required = true)]
    rows: Vec<usize>,
    /// monotone, adversarial or uniform[:COLS[:DOMAIN]].
    #[arg(long, default_value = "monotone")]
    gen: Generator,
    /// Constraint to check instead of the generator's own.
    #[arg(long)]
    dc: Option<String>,
    #[arg(long, value_enum, default_value = "range-tree")]
    backend: IndexBackend,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Timed runs per size; the median is reported.
    #[arg(long, default_value_t = 1)]
    runs: usize,
}

/// JSON lines, or a readable line per record on a terminal.
struct Out {
    tty: bool,
    stdout: io::Stdout,
}

impl Out {
    fn new() -> Self {
        let stdout = io::stdout();
        Out {
            tty: stdout.is_terminal(),
            stdout,
        }
    }

    fn emit(&self, record: Value, human: impl FnOnce() -> String) -> Result<()> {
        let mut lock = self.stdout.lock();
        if self.tty {
            writeln!(lock, "{}", human())?;
        } else {
            writeln!(lock, "{record}")?;
        }
        lock.flush()?;
        Ok(())
    }
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

fn load(data: &DataArgs) -> Result<Relation> {
    let schema = match &data.schema {
        Some(p) => Some(Schema::from_path(p).with_context(|| format!("reading schema {}", p.display()))?),
        None => None,
    };
    let options = IngestOptions {
        schema,
        ..Default::default()
    };
    ingest_csv(&data.data, &options).with_context(|| format!("reading {}", data.data.display()))
}

fn dataset_record(command: &str, path: &Path, r: &Relation) -> Value {
    json!({
        "type": "dataset",
        "command": command,
        "path": path.display().to_string(),
        "rows": r.row_count(),
        "columns": r.column_count(),
    })
}

/// Expands `@file` arguments into one constraint per non-empty, non-`#` line.
fn constraint_texts(args: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for a in args {
        match a.strip_prefix('@') {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
                out.extend(
                    text.lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with('#'))
                        .map(String::from),
                );
            }
            None => out.push(a.clone()),
        }
    }
    if out.is_empty() {
        bail!("no constraints given");
    }
    Ok(out)
}

fn cmd_verify(args: VerifyArgs, out: &Out) -> Result<ExitCode> {
    let r = load(&args.data)?;
    let dcs: Vec<DenialConstraint> = constraint_texts(&args.dc)?
        .iter()
        .map(|t| parse_dc(t, &r).with_context(|| format!("parsing `{t}`")))
        .collect::<Result<_>>()?;
    let nulls = NullPolicy::from(args.null_policy);
    out.emit(dataset_record("verify", &args.data.data, &r), || {
        format!(
            "{}: {} rows, {} columns",
            args.data.data.display(),
            r.row_count(),
            r.column_count()
        )
    })?;
    let mut all_hold = true;
    for dc in &dcs {
        let start = Instant::now();
        let v: Verdict = match args.backend {
            VerifyBackend::Oracle => brute_force_verify_with(&r, dc, DEFAULT_ROW_CAP, nulls)?,
            VerifyBackend::RangeTree => verify(&r, dc, &VerifyOptions::backend(Backend::RangeTree).with_nulls(nulls))?,
            VerifyBackend::KdTree => verify(&r, dc, &VerifyOptions::backend(Backend::KdTree).with_nulls(nulls))?,
            VerifyBackend::Linear => verify(&r, dc, &VerifyOptions::backend(Backend::Linear).with_nulls(nulls))?,
        };
        let elapsed = start.elapsed();
        all_hold &= v.holds;
        let text = format_dc(dc, &r);
        let witness = v.witness.map(|(s, t)| [s + 1, t + 1]);
        let record = json!({
            "type": "result",
            "dc": text,
            "holds": v.holds,
            "witness": witness,
            "rows_examined": v.rows_examined,
            "elapsed_ms": millis(elapsed),
            "backend": v.backend_used,
        });
        out.emit(record, || {
            let verdict = match witness {
                None => "holds".to_string(),
                Some([s, t]) => format!("VIOLATED by rows ({s}, {t})"),
            };
            format!(
                "{text:<60} {verdict:<26} rows {:>9}  {:>10.3} ms  {}",
                v.rows_examined,
                millis(elapsed),
                v.backend_used
            )
        })?;
    }
    Ok(if all_hold { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_discover(args: DiscoverArgs, out: &Out) -> Result<ExitCode> {
    let token = CancelToken::new();
    let flag = token.flag();
    ctrlc::set_handler(move || flag.store(true, std::sync::atomic::Ordering::SeqCst))
        .context("installing interrupt handler")?;
    let r = load(&args.data)?;
    let columns = match &args.columns {
        Some(names) => Some(
            names
                .iter()
                .map(|n| {
                    r.column_index(n.trim())
                        .with_context(|| format!("unknown column `{n}`"))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let time_budget = match args.time_budget {
        Some(s) if !(s.is_finite() && s >= 0.0) => bail!("--time-budget must be a non-negative number of seconds"),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let config = DiscoveryConfig {
        max_level: args.max_level,
        backend: args.backend.into(),
        time_budget,
        space: SpaceConfig {
            columns,
            cross_column: args.cross_column,
            ..Default::default()
        },
        sample: args.sample,
        seed: args.seed,
        nulls: args.null_policy.into(),
        ..Default::default()
    };

    out.emit(dataset_record("discover", &args.data.data, &r), || {
        format!(
            "{}: {} rows, {} columns",
            args.data.data.display(),
            r.row_count(),
            r.column_count()
        )
    })?;
    let mut sink_error = None;
    let summary = discover(&r, &config, Some(&token), |e| {
        if sink_error.is_some() {
            return;
        }
        let text = format_dc(&e.dc, &r);
        let record = json!({
            "type": "dc",
            "dc": text,
            "level": e.level,
            "elapsed_ms": millis(e.elapsed),
        });
        if let Err(err) = out.emit(record, || format!("[level {}] {text}", e.level)) {
            sink_error = Some(err);
        }
    })?;
    if let Some(err) = sink_error {
        return Err(err);
    }
    let stopped = summary.stopped.map(|s| match s {
        StopReason::Budget => "budget",
        StopReason::Cancelled => "interrupted",
    });
    let record = json!({
        "type": "summary",
        "emitted": summary.emitted.len(),
        "levels_completed": summary.levels_completed,
        "candidates_considered": summary.candidates_considered,
        "candidates_verified": summary.candidates_verified,
        "stopped": stopped,
        "elapsed_ms": millis(summary.elapsed),
    });
    out.emit(record, || {
        format!(
            "{} constraints, {} levels complete, {} of {} candidates verified{} in {:.3} ms",
            summary.emitted.len(),
            summary.levels_completed,
            summary.candidates_verified,
            summary.candidates_considered,
            stopped.map(|s| format!(", stopped by {s}")).unwrap_or_default(),
            millis(summary.elapsed)
        )
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs, out: &Out) -> Result<ExitCode> {
    let backend = Backend::from(args.backend);
    for &n in &args.rows {
        let (r, own) = bench::generate(args.gen, n, args.seed);
        let dc = match &args.dc {
            Some(text) => parse_dc(text, &r).with_context(|| format!("parsing `{text}`"))?,
            None => own,
        };
        let mut reports = (0..args.runs.max(1))
            .map(|_| bench::run(&r, &dc, backend))
            .collect::<Result<Vec<_>, _>>()?;
        reports.sort_by_key(|x| x.elapsed);
        let rep = &reports[reports.len() / 2];
        let nlogn = n as f64 * (n.max(2) as f64).log2();
        let record = json!({
            "type": "bench",
            "generator": args.gen.to_string(),
            "dc": format_dc(&dc, &r),
            "rows": n,
            "backend": backend.name(),
            "runs": reports.len(),
            "elapsed_ms": millis(rep.elapsed),
            "holds": rep.holds,
            "rows_examined": rep.rows_examined,
            "indexes_built": rep.indexes_built,
            "index_nodes": rep.index_nodes,
            "points_inserted": rep.points_inserted,
            "nodes_per_n_log2_n": rep.index_nodes as f64 / nlogn,
        });
        out.emit(record, || {
            format!(
                "{:>10} rows  {:>12.3} ms  holds={:<5}  examined {:>10}  nodes {:>12}  points {:>10}",
                n,
                millis(rep.elapsed),
                rep.holds,
                rep.rows_examined,
                rep.index_nodes,
                rep.points_inserted
            )
        })?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out::new();
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a, &out),
        Command::Discover(a) => cmd_discover(a, &out),
        Command::Bench(a) => cmd_bench(a, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
