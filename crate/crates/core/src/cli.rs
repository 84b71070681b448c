//! Command-line front end.

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::abelian::AbelianGroup;
use crate::budget::Budget;
use crate::error::EscError;
use crate::verify::{
    abelian_groups_up_to, closed_form_value, cross_check, known_values_table, sweep, Method,
    Outcome, VerificationReport,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_DISAGREEMENT: u8 = 4;

/// One computed value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// Canonical group spec, e.g. `C4xC3` for input `C12`.
    pub group: String,
    pub n: u64,
    pub method: String,
    /// Exact decimal value.
    pub count: String,
    pub elapsed_ms: u64,
}

#[derive(Debug, Parser)]
#[command(
    name = "esc-count",
    version,
    about = "Count isomorphism classes of element systems with characters over finite abelian groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute N(G, n) for one group.
    Count(CountArgs),
    /// Cross-check every method on all small groups and reproduce known values.
    Verify(VerifyArgs),
    /// Tabulate N(G, n) over several groups.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    /// Best applicable closed form.
    Closed,
    Congruence,
    Naive,
    Orbits,
    /// Every applicable method; over-budget ones are skipped.
    All,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Group spec such as C12, C4xC2 or C3^2.
    #[arg(long)]
    pub group: String,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = MethodChoice::Closed)]
    pub method: MethodChoice,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 16)]
    pub max_order: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_n: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["groups", "all_orders"]))]
pub struct TableArgs {
    /// Comma-separated group specs.
    #[arg(long, value_delimiter = ',')]
    pub groups: Vec<String>,
    /// Every abelian group of order up to this bound.
    #[arg(long)]
    pub all_orders: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn exit_code(err: &EscError) -> u8 {
    match err {
        EscError::Parse { .. } => EXIT_PARSE,
        EscError::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

fn write_records(out: &mut dyn Write, records: &[OutputRecord], format: Format) -> std::io::Result<()> {
    match format {
        Format::Text => {
            for r in records {
                writeln!(
                    out,
                    "{}\tn={}\t{}\t{}\t{} ms",
                    r.group, r.n, r.method, r.count, r.elapsed_ms
                )?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, records)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            if records.is_empty() {
                w.write_record(["group", "n", "method", "count", "elapsed_ms"])?;
            }
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Parse arguments and run, writing results to `out` and diagnostics to
/// `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_PARSE
                }
            };
        }
    };
    let budget = match Budget::from_env() {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let result = match cli.command {
        Command::Count(args) => cmd_count(&args, &budget, out, err),
        Command::Verify(args) => cmd_verify(&args, &budget, out, err),
        Command::Table(args) => cmd_table(&args, &budget, out, err),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Esc(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

enum CliError {
    Esc(EscError),
    Io(std::io::Error),
}

impl From<EscError> for CliError {
    fn from(e: EscError) -> Self {
        CliError::Esc(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn single(
    group: &AbelianGroup,
    n: u64,
    method: MethodChoice,
    budget: &Budget,
) -> Result<OutputRecord, EscError> {
    let start = Instant::now();
    let nn = n as usize;
    let (used, count) = match method {
        MethodChoice::Closed => closed_form_value(group, nn, budget)?,
        MethodChoice::Congruence => (Method::Congruence, Method::Congruence.evaluate(group, nn, budget)?),
        MethodChoice::Naive => (Method::Naive, Method::Naive.evaluate(group, nn, budget)?),
        MethodChoice::Orbits => (Method::Orbits, Method::Orbits.evaluate(group, nn, budget)?),
        MethodChoice::All => unreachable!("handled by the caller"),
    };
    Ok(OutputRecord {
        group: group.to_string(),
        n,
        method: used.name().to_string(),
        count: count.to_string(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

fn cmd_count(
    args: &CountArgs,
    budget: &Budget,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, CliError> {
    let group = AbelianGroup::parse(&args.group)?;
    if args.method != MethodChoice::All {
        let record = single(&group, args.n, args.method, budget)?;
        write_records(out, &[record], args.format)?;
        return Ok(EXIT_OK);
    }
    let case = cross_check(&group, args.n as usize, &Method::ALL, budget);
    let mut records = Vec::new();
    for r in &case.results {
        match &r.outcome {
            Outcome::Computed { count } => records.push(OutputRecord {
                group: case.group.clone(),
                n: args.n,
                method: r.method.name().to_string(),
                count: count.clone(),
                elapsed_ms: r.elapsed_ms,
            }),
            Outcome::Skipped { reason } => writeln!(err, "skipped {}: {reason}", r.method)?,
            Outcome::Failed { error } => writeln!(err, "failed {}: {error}", r.method)?,
        }
    }
    write_records(out, &records, args.format)?;
    if case.agree {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "error: methods disagree for {} at n = {}", case.group, args.n)?;
        Ok(EXIT_DISAGREEMENT)
    }
}

fn write_report_text(out: &mut dyn Write, report: &VerificationReport) -> std::io::Result<()> {
    for case in &report.cases {
        let status = if case.agree { "ok" } else { "DISAGREE" };
        let values: Vec<String> = case
            .results
            .iter()
            .map(|r| match &r.outcome {
                Outcome::Computed { count } => format!("{}={count}", r.method),
                Outcome::Skipped { .. } => format!("{}=skipped", r.method),
                Outcome::Failed { .. } => format!("{}=failed", r.method),
            })
            .collect();
        writeln!(
            out,
            "{status}\t{}\tn={}\t{}\t{} ms",
            case.group,
            case.n,
            values.join(" "),
            case.elapsed_ms
        )?;
    }
    for row in &report.known_values {
        let status = if row.matches { "ok" } else { "MISMATCH" };
        writeln!(
            out,
            "{status}\t{}\tn={}\texpected {} ({})\tcomputed {} ({})",
            row.group, row.n, row.expected, row.source, row.computed, row.computed_by
        )?;
    }
    let s = &report.summary;
    writeln!(
        out,
        "cases: {} agreeing, {} disagreeing, {} methods skipped; known values: {} rows, {} mismatches",
        s.agreeing, s.disagreeing, s.skipped_methods, s.known_rows, s.known_mismatches
    )?;
    for flag in &report.flags {
        writeln!(out, "flag: {flag}")?;
    }
    Ok(())
}

fn cmd_verify(
    args: &VerifyArgs,
    budget: &Budget,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, CliError> {
    let swept = sweep(args.max_order, args.max_n as usize, budget)?;
    let report = VerificationReport::from_parts(swept.cases, known_values_table(budget)?);
    match args.format {
        Format::Text => write_report_text(out, &report)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let records: Vec<OutputRecord> = report
                .cases
                .iter()
                .flat_map(|c| {
                    c.results.iter().filter_map(move |r| match &r.outcome {
                        Outcome::Computed { count } => Some(OutputRecord {
                            group: c.group.clone(),
                            n: c.n as u64,
                            method: r.method.name().to_string(),
                            count: count.clone(),
                            elapsed_ms: r.elapsed_ms,
                        }),
                        _ => None,
                    })
                })
                .collect();
            write_records(out, &records, Format::Csv)?;
        }
    }
    if report.is_clean() {
        Ok(EXIT_OK)
    } else {
        for flag in &report.flags {
            writeln!(err, "disagreement: {flag}")?;
        }
        Ok(EXIT_FAILURE)
    }
}

fn cmd_table(
    args: &TableArgs,
    budget: &Budget,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> Result<u8, CliError> {
    let groups = match args.all_orders {
        Some(max) => abelian_groups_up_to(max)?,
        None => args
            .groups
            .iter()
            .map(|s| AbelianGroup::parse(s.trim()))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let records = groups
        .iter()
        .map(|g| single(g, args.n, MethodChoice::Closed, budget))
        .collect::<Result<Vec<_>, _>>()?;
    write_records(out, &records, args.format)?;
    Ok(EXIT_OK)
}
