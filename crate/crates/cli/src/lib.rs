//! Batch front end: `close`, `entail`, `model` and `bench`.
//!
//! Every command writes its report to the supplied writer and returns the
//! process exit status; `main` only maps errors to status 2.

use std::io::{self, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;
use utvpi::oracle::{generate_satisfiable, InstanceSpec};
use utvpi::{
    decode, encode_all, entails, extract_model, parse_constraint, parse_system, strong_closure,
    tight_closure, ClosureOutcome, IntConstraint, Rational64, Scalar, System,
};

/// Exit status for SAT / ENTAILED.
pub const EXIT_YES: u8 = 0;
/// Exit status for UNSAT / NOT ENTAILED.
pub const EXIT_NO: u8 = 1;
/// Exit status for unreadable or malformed input.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: utvpi::ParseError },
    #[error("query: {0}")]
    Query(utvpi::ParseError),
    #[error("--vars {given} is smaller than the {needed} variables the input mentions")]
    TooFewVars { given: usize, needed: usize },
    #[error("bench needs at least one size")]
    NoSizes,
    #[error(transparent)]
    Core(#[from] utvpi::Error),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "utvpi", version, about = "Integer octagonal constraint solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the closed system, or the inconsistency verdict.
    Close {
        #[command(flatten)]
        input: Input,
        /// Use exact rational strong closure instead of integer tight closure.
        #[arg(long)]
        rational: bool,
    },
    /// Decide whether the system implies QUERY.
    Entail {
        #[command(flatten)]
        input: Input,
        /// A single constraint, e.g. "x0 - x2 <= 3".
        query: String,
    },
    /// Print an integer solution.
    Model {
        #[command(flatten)]
        input: Input,
    },
    /// Time tight closure on dense satisfiable instances.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct Input {
    /// Constraint file, one `[-]x<i> [(+|-) x<j>] <= <int>` per line.
    pub file: PathBuf,
    /// Number of variables; defaults to one more than the largest index.
    #[arg(long)]
    pub vars: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Variable counts to time.
    #[arg(long, value_delimiter = ',', default_values_t = [25, 50, 100, 200])]
    pub sizes: Vec<usize>,
    /// Probability of keeping each constraint pattern.
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Timed runs per size; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Close { input, rational } => close(&input, rational, out),
        Command::Entail { input, query } => entail(&input, &query, out),
        Command::Model { input } => model(&input, out),
        Command::Bench(args) => bench_cmd(&args, out),
    }
}

fn load<T: Scalar>(input: &Input) -> Result<System<T>, CliError> {
    let text = std::fs::read_to_string(&input.file).map_err(|source| CliError::Io {
        path: input.file.clone(),
        source,
    })?;
    let mut sys = parse_system(&text).map_err(|source| CliError::Parse {
        path: input.file.clone(),
        source,
    })?;
    if let Some(given) = input.vars {
        if given < sys.vars {
            return Err(CliError::TooFewVars { given, needed: sys.vars });
        }
        sys.vars = given;
    }
    Ok(sys)
}

fn verdict<T>(outcome: &ClosureOutcome<T>) -> String {
    match outcome {
        ClosureOutcome::Closed(_) => "SAT".to_string(),
        ClosureOutcome::Bottom(kind) => format!("UNSAT({kind})"),
    }
}

fn status<T: Scalar>(outcome: &ClosureOutcome<T>) -> u8 {
    if outcome.is_bottom() {
        EXIT_NO
    } else {
        EXIT_YES
    }
}

fn emit(out: &mut impl Write, format: Format, lines: &[String], value: Value) -> Result<(), CliError> {
    match format {
        Format::Text => {
            for line in lines {
                writeln!(out, "{line}")?;
            }
        }
        Format::Json => writeln!(out, "{value}")?,
    }
    Ok(())
}

fn report_close<T: Scalar>(outcome: &ClosureOutcome<T>, format: Format, out: &mut impl Write) -> Result<u8, CliError> {
    let constraints: Vec<String> = outcome
        .graph()
        .map(|g| decode(g).iter().map(ToString::to_string).collect())
        .unwrap_or_default();
    let head = verdict(outcome);
    let value = json!({ "verdict": head, "constraints": constraints });
    let lines: Vec<String> = std::iter::once(head).chain(constraints).collect();
    emit(out, format, &lines, value)?;
    Ok(status(outcome))
}

pub fn close(input: &Input, rational: bool, out: &mut impl Write) -> Result<u8, CliError> {
    if rational {
        let sys = load::<Rational64>(input)?;
        let outcome = strong_closure(encode_all(sys.vars, &sys.constraints)?)?;
        report_close(&outcome, input.format, out)
    } else {
        let sys = load::<i64>(input)?;
        let outcome = tight_closure(encode_all(sys.vars, &sys.constraints)?)?;
        report_close(&outcome, input.format, out)
    }
}

pub fn entail(input: &Input, query: &str, out: &mut impl Write) -> Result<u8, CliError> {
    let sys = load::<i64>(input)?;
    let query: IntConstraint = parse_constraint(query).map_err(CliError::Query)?;
    // Variables only the query mentions are unconstrained.
    let vars = sys.vars.max(query.max_var() + 1);
    let outcome = tight_closure(encode_all(vars, &sys.constraints)?)?;
    let unsat = outcome.is_bottom();
    let holds = entails(&outcome, &query)?;
    let text = match (holds, unsat) {
        (true, true) => "ENTAILED (unsat)",
        (true, false) => "ENTAILED",
        (false, _) => "NOT ENTAILED",
    };
    let value = json!({ "verdict": if holds { "ENTAILED" } else { "NOT ENTAILED" }, "unsat": unsat });
    emit(out, input.format, &[text.to_string()], value)?;
    Ok(if holds { EXIT_YES } else { EXIT_NO })
}

pub fn model(input: &Input, out: &mut impl Write) -> Result<u8, CliError> {
    let sys = load::<i64>(input)?;
    let outcome = tight_closure(encode_all(sys.vars, &sys.constraints)?)?;
    match &outcome {
        ClosureOutcome::Closed(g) => {
            let m = extract_model(g)?;
            let lines: Vec<String> = m.0.iter().enumerate().map(|(i, v)| format!("x{i} = {v}")).collect();
            let values: serde_json::Map<String, Value> =
                m.0.iter().enumerate().map(|(i, v)| (format!("x{i}"), json!(v))).collect();
            emit(out, input.format, &lines, json!({ "verdict": "SAT", "model": values }))?;
        }
        ClosureOutcome::Bottom(_) => {
            let head = verdict(&outcome);
            emit(out, input.format, std::slice::from_ref(&head), json!({ "verdict": &head, "model": null }))?;
        }
    }
    Ok(status(&outcome))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub vars: usize,
    pub constraints: usize,
    pub median: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log(median time) against log(n); `None` with
    /// fewer than two distinct sizes.
    pub exponent: Option<f64>,
}

/// Median wall time of tight closure per size.
///
/// Instances come from the planted generator so the closure never stops
/// early at an inconsistency; each size reuses `seed`. Encoding and the
/// graph copy are outside the timed region.
pub fn bench(sizes: &[usize], density: f64, seed: u64, reps: usize) -> Result<BenchReport, CliError> {
    if sizes.is_empty() {
        return Err(CliError::NoSizes);
    }
    let reps = reps.max(1);
    let mut rows = Vec::with_capacity(sizes.len());
    for &vars in sizes {
        let spec = InstanceSpec { vars, density, bound_range: 100, seed };
        let (cs, _) = generate_satisfiable(&spec);
        let graph = encode_all(vars, &cs)?;
        let mut times = Vec::with_capacity(reps);
        for _ in 0..reps {
            let g = graph.clone();
            let start = Instant::now();
            let outcome = tight_closure(g)?;
            times.push(start.elapsed());
            std::hint::black_box(outcome);
        }
        times.sort();
        rows.push(BenchRow { vars, constraints: cs.len(), median: times[times.len() / 2] });
    }
    let exponent = growth_exponent(&rows);
    Ok(BenchReport { rows, exponent })
}

fn growth_exponent(rows: &[BenchRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.vars > 0 && !r.median.is_zero())
        .map(|r| ((r.vars as f64).ln(), r.median.as_secs_f64().ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (pts.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn bench_cmd(args: &BenchArgs, out: &mut impl Write) -> Result<u8, CliError> {
    let report = bench(&args.sizes, args.density, args.seed, args.reps)?;
    let mut lines = vec!["n\tconstraints\tmedian_ms".to_string()];
    for r in &report.rows {
        lines.push(format!("{}\t{}\t{:.3}", r.vars, r.constraints, millis(r.median)));
    }
    lines.push(match report.exponent {
        Some(e) => format!("exponent\t{e:.2}"),
        None => "exponent\tn/a".to_string(),
    });
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| json!({ "n": r.vars, "constraints": r.constraints, "median_ms": millis(r.median) }))
        .collect();
    let value = json!({ "rows": rows, "exponent": report.exponent, "reps": args.reps.max(1), "seed": args.seed });
    emit(out, args.format, &lines, value)?;
    Ok(EXIT_YES)
}
