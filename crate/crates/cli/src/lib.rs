//! The `rindex` command line: compute, validate, simulate, check-conservation.
//!
//! Exit codes: 0 success, 1 data/ingest/engine/I-O failure, 2 bad flags.
//! Reports go to stdout; errors and warnings go to stderr.

pub mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rindex_core::engine::{closure_issues, latest_date, ClosureIssue};
use rindex_core::ingest::{write_papers_csv, write_reviews_csv};
use rindex_core::model::DEFAULT_LAG_MONTHS;
use rindex_core::sim::{ReviewCountModel, REVIEWS_PER_PAPER_MEAN, REVIEWS_PER_PAPER_SD};
use rindex_core::{
    compute_all, generate_community, load_dataset_files, r_index, Dataset, EditorialMode,
    EvaluationConfig, Format, RIndexReport, Rational, ResearcherId, SimConfig,
};
use serde_json::json;

use render::{render, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rindex", version, about = "Peer-review balance (R-Index) accounting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the R-Index of every researcher in a ledger.
    Compute(ComputeArgs),
    /// Check a ledger pair and list every error and warning.
    Validate(LedgerArgs),
    /// Write a seeded synthetic closed community.
    Simulate(SimulateArgs),
    /// Verify that a closed ledger balances to zero.
    CheckConservation(ConservationArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeFlag {
    Round,
    Paper,
}

impl From<ModeFlag> for EditorialMode {
    fn from(m: ModeFlag) -> Self {
        match m {
            ModeFlag::Round => EditorialMode::PerRound,
            ModeFlag::Paper => EditorialMode::PerPaper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

impl From<ReportFormat> for OutputFormat {
    fn from(f: ReportFormat) -> Self {
        match f {
            ReportFormat::Json => OutputFormat::Json,
            ReportFormat::Csv => OutputFormat::Csv,
            ReportFormat::Table => OutputFormat::Table,
        }
    }
}

#[derive(Debug, Args)]
pub struct LedgerArgs {
    pub papers: PathBuf,
    pub reviews: PathBuf,
    /// Input format; inferred from the papers file extension when omitted.
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
}

impl LedgerArgs {
    fn format(&self) -> Format {
        match self.input_format {
            Some(InputFormat::Csv) => Format::Csv,
            Some(InputFormat::Json) => Format::Json,
            None => Format::from_path(&self.papers),
        }
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub ledger: LedgerArgs,
    #[arg(long)]
    pub as_of: NaiveDate,
    #[arg(long)]
    pub window_start: Option<NaiveDate>,
    #[arg(long, default_value_t = DEFAULT_LAG_MONTHS)]
    pub lag_months: u32,
    #[arg(long, value_enum, default_value = "round")]
    pub editorial_mode: ModeFlag,
    /// Count editor-excluded reviews anyway.
    #[arg(long)]
    pub no_exclusions: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: ReportFormat,
    /// Only report this researcher.
    #[arg(long)]
    pub researcher: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub researchers: usize,
    #[arg(long, default_value_t = 3)]
    pub papers_per_researcher: usize,
    #[arg(long, default_value_t = 1)]
    pub min_authors: usize,
    #[arg(long, default_value_t = 3)]
    pub max_authors: usize,
    #[arg(long, default_value_t = REVIEWS_PER_PAPER_MEAN)]
    pub mean: f64,
    #[arg(long, default_value_t = REVIEWS_PER_PAPER_SD)]
    pub sd: f64,
    #[arg(long, default_value = "2015-01-01")]
    pub start_date: NaiveDate,
    #[arg(long, default_value = "2020-12-31")]
    pub end_date: NaiveDate,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConservationArgs {
    #[command(flatten)]
    pub ledger: LedgerArgs,
    /// Defaults to the latest date in the ledger.
    #[arg(long)]
    pub as_of: Option<NaiveDate>,
    #[arg(long, value_enum, default_value = "round")]
    pub editorial_mode: ModeFlag,
    #[arg(long)]
    pub no_exclusions: bool,
}

/// Parse `args` (including the program name) and run. Never exits the process.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Compute(args) => cmd_compute(&args, out, err),
        Command::Validate(args) => cmd_validate(&args, out, err),
        Command::Simulate(args) => cmd_simulate(&args, out, err),
        Command::CheckConservation(args) => cmd_check_conservation(&args, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: writing output: {e}");
        EXIT_FAILURE
    })
}

type CmdResult = std::io::Result<i32>;

/// Load a ledger, printing warnings. Errors are printed and yield `None`.
fn load(ledger: &LedgerArgs, err: &mut dyn Write) -> std::io::Result<Option<Dataset>> {
    let report = load_dataset_files(&ledger.papers, &ledger.reviews, ledger.format());
    for e in &report.errors {
        writeln!(err, "error: {e}")?;
    }
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(report.dataset)
}

pub fn cmd_compute(args: &ComputeArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let config = match EvaluationConfig::new(args.as_of).with_window_start(args.window_start) {
        Ok(c) => c
            .with_lag_months(args.lag_months)
            .with_editorial_mode(args.editorial_mode.into())
            .with_honor_exclusions(!args.no_exclusions),
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let Some(dataset) = load(&args.ledger, err)? else {
        return Ok(EXIT_FAILURE);
    };

    let reports: Result<Vec<RIndexReport>, _> = match &args.researcher {
        Some(id) => match ResearcherId::new(id.as_str()) {
            Ok(id) => r_index(&id, &dataset, &config).map(|r| vec![r]),
            Err(e) => {
                writeln!(err, "error: --researcher: {e}")?;
                return Ok(EXIT_USAGE);
            }
        },
        None => compute_all(&dataset, &config),
    };
    match reports {
        Ok(reports) => {
            out.write_all(render(&reports, args.format.into()).content.as_bytes())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(EXIT_FAILURE)
        }
    }
}

pub fn cmd_validate(args: &LedgerArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let report = load_dataset_files(&args.papers, &args.reviews, args.format());
    for e in &report.errors {
        writeln!(err, "error: {e}")?;
    }
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    writeln!(
        out,
        "{} error(s), {} warning(s)",
        report.errors.len(),
        report.warnings.len()
    )?;
    if let Some(ds) = &report.dataset {
        writeln!(
            out,
            "{} papers, {} review events, {} researchers",
            ds.papers().len(),
            ds.events().len(),
            ds.researchers().len()
        )?;
    }
    Ok(if report.errors.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let config = SimConfig {
        seed: args.seed,
        n_researchers: args.researchers,
        papers_per_researcher: args.papers_per_researcher,
        authors_per_paper: (args.min_authors, args.max_authors),
        reviews: ReviewCountModel {
            mean: args.mean,
            sd: args.sd,
        },
        start_date: args.start_date,
        end_date: args.end_date,
    };
    let dataset = match generate_community(&config) {
        Ok(ds) => ds,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FAILURE);
        }
    };
    let papers = write_papers_csv(&dataset).expect("generated ids are plain");
    let reviews = write_reviews_csv(&dataset).expect("generated ids are plain");
    let manifest = json!({
        "seed": config.seed,
        "researchers": config.n_researchers,
        "papers_per_researcher": config.papers_per_researcher,
        "authors_per_paper": { "min": config.authors_per_paper.0, "max": config.authors_per_paper.1 },
        "review_count_mean": config.reviews.mean,
        "review_count_sd": config.reviews.sd,
        "start_date": config.start_date.to_string(),
        "end_date": config.end_date.to_string(),
        "papers": dataset.papers().len(),
        "review_events": dataset.events().len(),
    });
    let manifest = serde_json::to_string_pretty(&manifest).expect("json values serialize") + "\n";

    let write = |name: &str, body: &str| -> std::io::Result<()> {
        fs::create_dir_all(&args.out)?;
        fs::write(args.out.join(name), body)
    };
    for (name, body) in [
        ("papers.csv", &papers),
        ("reviews.csv", &reviews),
        ("manifest.json", &manifest),
    ] {
        if let Err(e) = write(name, body) {
            writeln!(err, "error: {}: {e}", args.out.join(name).display())?;
            return Ok(EXIT_FAILURE);
        }
    }
    writeln!(
        out,
        "wrote {} papers and {} review events to {}",
        dataset.papers().len(),
        dataset.events().len(),
        args.out.display()
    )?;
    Ok(EXIT_OK)
}

fn describe(issue: &ClosureIssue) -> String {
    match issue {
        ClosureIssue::UnlinkedReview(e) => format!("review `{e}` is not linked to a ledger paper"),
        ClosureIssue::EditorialEvent(e) => format!("editorial event `{e}` has no received-review counterpart"),
        ClosureIssue::ExcludedReview(e) => format!("review `{e}` is excluded"),
        ClosureIssue::CountMismatch(d) => format!(
            "paper `{}` declares {} reviews but {} linked review events exist",
            d.paper_id, d.declared, d.observed
        ),
    }
}

pub fn cmd_check_conservation(
    args: &ConservationArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let Some(dataset) = load(&args.ledger, err)? else {
        return Ok(EXIT_FAILURE);
    };
    let as_of = args
        .as_of
        .or_else(|| latest_date(&dataset))
        .unwrap_or(NaiveDate::MIN);
    let honor = !args.no_exclusions;
    let config = EvaluationConfig::new(as_of)
        .with_lag_months(0)
        .with_editorial_mode(args.editorial_mode.into())
        .with_honor_exclusions(honor);
    let total: Rational = match compute_all::<Rational>(&dataset, &config) {
        Ok(reports) => reports.into_iter().map(|r| r.r_index).sum(),
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FAILURE);
        }
    };
    writeln!(out, "{}", render::exact(&total))?;

    let issues = closure_issues(&dataset, honor);
    for issue in &issues {
        writeln!(err, "not closed: {}", describe(issue))?;
    }
    if !total.is_zero() {
        writeln!(err, "error: R-Index values sum to {}, expected 0", render::exact(&total))?;
    }
    Ok(if issues.is_empty() && total.is_zero() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

/// Convenience for tests and scripts: run with `rindex` as the program name.
pub fn run_args(args: &[&str], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    run(std::iter::once("rindex").chain(args.iter().copied()), out, err)
}
