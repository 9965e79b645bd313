//! The `occg` command line: validate logs and constraint files, print log
//! statistics, and monitor constraints over an optional time window.
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 I/O failure,
//! 3 a constraint is violated and `--fail-on-violation` was given.

pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use occg_core::metrics::{self, perf};
use occg_core::{
    dsl, load_log, monitor_all, Cardinality, ConstraintGraph, CsvSpec, EventLog, IoError, LogStats,
    MeasureKey, Timestamp,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "occg",
    version,
    about = "Monitor object-centric constraint graphs over event logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, clap::Args)]
struct LogArgs {
    /// Event log (.jsonocel, .json or .csv)
    log: PathBuf,
    /// JSON file describing the columns of a CSV log
    #[arg(long, value_name = "FILE")]
    csv_spec: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a log (and optionally a constraint file) is well formed
    Validate {
        #[command(flatten)]
        log: LogArgs,
        /// Constraint file (.occg)
        constraints: Option<PathBuf>,
    },
    /// Print log characteristics and metrics
    Stats {
        #[command(flatten)]
        log: LogArgs,
        /// Object type to report on (repeatable)
        #[arg(long = "type", value_name = "TYPE")]
        types: Vec<String>,
        /// Activity to report on (repeatable)
        #[arg(long = "activity", value_name = "ACTIVITY")]
        activities: Vec<String>,
    },
    /// Evaluate constraints against a log
    Monitor {
        #[command(flatten)]
        log: LogArgs,
        /// Constraint file (.occg)
        constraints: PathBuf,
        /// Keep events at or after this ISO-8601 instant
        #[arg(long)]
        from: Option<String>,
        /// Keep events at or before this ISO-8601 instant
        #[arg(long)]
        to: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Exit with status 3 when any constraint is violated
        #[arg(long)]
        fail_on_violation: bool,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("cannot read {}: {e}", path.display()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = if matches!(e, IoError::Io { .. }) {
            EXIT_IO
        } else {
            EXIT_INVALID
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line with `args` (including the program name) and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate { log, constraints } => validate(&log, constraints.as_deref(), out, err),
        Command::Stats {
            log,
            types,
            activities,
        } => stats(&log, &types, &activities, out, err),
        Command::Monitor {
            log,
            constraints,
            from,
            to,
            format,
            fail_on_violation,
        } => monitor(
            &log,
            &constraints,
            from.as_deref(),
            to.as_deref(),
            format,
            fail_on_violation,
            out,
            err,
        ),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_csv_spec(path: &Path) -> Result<CsvSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("invalid CSV spec {}: {e}", path.display())))
}

fn open_log(args: &LogArgs, err: &mut dyn Write) -> Result<EventLog, Failure> {
    let spec = args.csv_spec.as_deref().map(read_csv_spec).transpose()?;
    let log = load_log(&args.log, spec.as_ref())?;
    for w in log.warnings() {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(log)
}

fn open_constraints(path: &Path) -> Result<Vec<ConstraintGraph>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    dsl::parse(&text).map_err(|e| Failure::invalid(format!("{}:{e}", path.display())))
}

fn validate(
    args: &LogArgs,
    constraints: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let log = open_log(args, err)?;
    let _ = writeln!(
        out,
        "{}: ok ({} events, {} objects, {} relation pairs)",
        args.log.display(),
        log.events().len(),
        log.objects().len(),
        log.relation_len()
    );
    if let Some(path) = constraints {
        let graphs = open_constraints(path)?;
        let _ = writeln!(out, "{}: ok ({} constraints)", path.display(), graphs.len());
    }
    Ok(EXIT_OK)
}

fn check_names<'a>(
    requested: &'a [String],
    known: &[&str],
    what: &str,
) -> Result<Vec<&'a str>, Failure> {
    for r in requested {
        if !known.contains(&r.as_str()) {
            return Err(Failure::invalid(format!(
                "unknown {what} `{r}`; known: {}",
                if known.is_empty() {
                    "(none)".to_string()
                } else {
                    known.join(", ")
                }
            )));
        }
    }
    Ok(requested.iter().map(String::as_str).collect())
}

fn fmt_metric(r: Result<f64, occg_core::MetricError>) -> String {
    match r {
        Ok(v) => format!("{v}"),
        Err(_) => "undefined".to_string(),
    }
}

fn stats(
    args: &LogArgs,
    types: &[String],
    activities: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let log = open_log(args, err)?;
    let s = LogStats::new(&log);
    let all_types: Vec<&str> = log.types().into_iter().map(|t| t.as_str()).collect();
    let all_acts: Vec<&str> = log.acts().into_iter().map(|a| a.as_str()).collect();
    let types = check_names(types, &all_types, "object type")?;
    let acts = check_names(activities, &all_acts, "activity")?;

    let mut w = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(w, "events: {}", log.events().len());
    let _ = writeln!(w, "objects: {}", log.objects().len());
    let _ = writeln!(w, "relation pairs: {}", log.relation_len());
    let _ = writeln!(
        w,
        "activities ({}): {}",
        all_acts.len(),
        all_acts.join(", ")
    );
    let _ = writeln!(
        w,
        "object types ({}): {}",
        all_types.len(),
        all_types.join(", ")
    );
    for t in &all_types {
        let _ = writeln!(w, "  {t}: {} objects", s.object_count(t));
    }
    for a in &all_acts {
        let _ = writeln!(w, "  {a}: {} events", s.event_count(a));
    }

    if !types.is_empty() || !acts.is_empty() {
        let types = if types.is_empty() {
            all_types.clone()
        } else {
            types
        };
        let acts = if acts.is_empty() {
            all_acts.clone()
        } else {
            acts
        };
        for t in &types {
            for a in &acts {
                let _ = writeln!(w, "\n[{t}, {a}]");
                let _ = writeln!(w, "  #({t},{{{a}}}) = {}", s.count_containing(t, [a]));
                let _ = writeln!(w, "  #0 = {}", s.count_cardinality(t, a, Cardinality::Zero));
                let _ = writeln!(w, "  #1 = {}", s.count_cardinality(t, a, Cardinality::One));
                let _ = writeln!(w, "  #* = {}", s.count_cardinality(t, a, Cardinality::Many));
                let _ = writeln!(w, "  absent = {}", fmt_metric(metrics::absent(&s, t, a)));
                let _ = writeln!(
                    w,
                    "  singular = {}",
                    fmt_metric(metrics::singular(&s, t, a))
                );
                let _ = writeln!(
                    w,
                    "  multiple = {}",
                    fmt_metric(metrics::multiple(&s, t, a))
                );
                let _ = writeln!(
                    w,
                    "  skip_strength = {}",
                    fmt_metric(metrics::skip_strength(&s, t, a))
                );
                let m = MeasureKey::AvgObjectCount((*t).into());
                let _ = writeln!(w, "  {m} = {}", fmt_metric(perf(&s, a, &m)));
            }
            for a in &acts {
                for b in &acts {
                    if a == b {
                        continue;
                    }
                    let _ = writeln!(
                        w,
                        "\n[{t}, {a} -> {b}]\n  #({t},{a},{b}) = {}\n  causal = {}\n  concur = {}\n  choice = {}",
                        s.count_followed_by(t, a, b),
                        metrics::causal(&s, t, a, b),
                        metrics::concur(&s, t, a, b),
                        metrics::choice(&s, t, a, b),
                    );
                }
            }
        }
        for a in &acts {
            let _ = writeln!(w, "\n[{a}]");
            for m in [MeasureKey::EventCount, MeasureKey::AvgSojournTime] {
                let _ = writeln!(w, "  {m} = {}", fmt_metric(perf(&s, a, &m)));
            }
        }
    }
    let _ = out.write_all(w.as_bytes());
    Ok(EXIT_OK)
}

fn parse_instant(flag: &str, value: Option<&str>) -> Result<Option<Timestamp>, Failure> {
    value
        .map(|v| {
            Timestamp::parse_iso8601(v).map_err(|e| Failure::invalid(format!("--{flag}: {e}")))
        })
        .transpose()
}

#[allow(clippy::too_many_arguments)]
fn monitor(
    args: &LogArgs,
    constraints: &Path,
    from: Option<&str>,
    to: Option<&str>,
    format: Format,
    fail_on_violation: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let from = parse_instant("from", from)?;
    let to = parse_instant("to", to)?;
    let log = open_log(args, err)?;
    let graphs = open_constraints(constraints)?;
    let log = if from.is_some() || to.is_some() {
        log.filter_time_window(from, to)
            .map_err(|e| Failure::invalid(e.to_string()))?
    } else {
        log
    };
    let verdicts = monitor_all(&log, &graphs).map_err(|e| Failure::invalid(e.to_string()))?;
    match format {
        Format::Json => {
            let _ = out.write_all(report::render_json(&verdicts).as_bytes());
        }
        Format::Table => {
            let label = args
                .log
                .file_stem()
                .map_or_else(|| "log".to_string(), |s| s.to_string_lossy().into_owned());
            let _ = out.write_all(report::render_table(&verdicts, &label).as_bytes());
            for v in &verdicts {
                for w in &v.warnings {
                    let _ = writeln!(err, "warning: {}: {w}", v.name);
                }
            }
        }
    }
    if fail_on_violation && verdicts.iter().any(|v| v.violated) {
        Ok(EXIT_VIOLATION)
    } else {
        Ok(EXIT_OK)
    }
}
