//! The `metacond` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{ArgAction, Parser};
use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::domain::{AnalysisConfig, DomainError, EffectSizeKind, SubgroupKey};
use crate::engine::{analyze_subgroup, EngineError};
use crate::ingest::{parse_input, summarize_table, IngestError};
use crate::report::{sig6, write_outputs_with, OutputOptions, ReportError, MANIFEST_FILE};
use crate::subgrouping::{enumerate_subgroups_with, MembershipPolicy};

#[derive(Debug, Parser)]
#[command(
    name = "metacond",
    version,
    about = "Meta-analysis of every condition combination in a study table"
)]
struct Args {
    /// Semicolon-separated study table.
    #[arg(long = "input_fname", value_name = "FILE")]
    input_fname: PathBuf,

    /// Significance level; intervals have confidence 1 - alpha.
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha, allow_negative_numbers = true)]
    alpha: f64,

    /// Effect size: Hedges or Cohen.
    #[arg(long = "which_delta", value_name = "KIND", default_value = "Hedges", value_parser = parse_kind)]
    which_delta: EffectSizeKind,

    /// Directory receiving one folder per subgroup and manifest.json.
    #[arg(long = "output_dir", value_name = "DIR", default_value = "output")]
    output_dir: PathBuf,

    /// Also compile the LaTeX figures with pdflatex.
    #[arg(long)]
    pdf: bool,

    /// Skip subgroups in which a study contributes more than one row.
    #[arg(long = "reject_repeated")]
    reject_repeated: bool,

    /// More diagnostics on stderr (-v, -vv).
    #[arg(short, long, action = ArgAction::Count)]
    verbose: u8,
}

fn parse_alpha(s: &str) -> Result<f64, DomainError> {
    let alpha: f64 = s
        .trim()
        .parse()
        .map_err(|_| DomainError::InvalidAlpha(f64::NAN))?;
    AnalysisConfig::new(alpha, EffectSizeKind::Hedges).map(|c| c.alpha())
}

fn parse_kind(s: &str) -> Result<EffectSizeKind, DomainError> {
    s.parse()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliOptions {
    pub input_path: PathBuf,
    pub config: AnalysisConfig,
    pub output_dir: PathBuf,
    pub compile_pdf: bool,
    pub policy: MembershipPolicy,
    pub verbosity: u8,
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed command line, or `--help` / `--version` (exit 0).
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("invalid --alpha {0:?}: must lie strictly between 0 and 1")]
    InvalidAlpha(String),
    #[error("invalid --which_delta {0:?}: expected Hedges or Cohen")]
    InvalidKind(String),
    #[error("input file not found: {}", .0.display())]
    InputNotFound(PathBuf),
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("{0}")]
    Analysis(String),
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Report(#[from] ReportError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(e) if !e.use_stderr() => 0,
            Self::Usage(_)
            | Self::InvalidAlpha(_)
            | Self::InvalidKind(_)
            | Self::InputNotFound(_) => 2,
            Self::Parse { .. } => 3,
            Self::Analysis(_) => 4,
            Self::Read { .. } | Self::Report(_) => 5,
        }
    }
}

/// Parses `argv` (including the program name) into validated options.
pub fn parse_args<I, T>(argv: I) -> Result<CliOptions, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(classify)?;
    if !args.input_fname.is_file() {
        return Err(CliError::InputNotFound(args.input_fname));
    }
    Ok(CliOptions {
        input_path: args.input_fname,
        config: AnalysisConfig::new(args.alpha, args.which_delta)
            .expect("alpha validated by the parser"),
        output_dir: args.output_dir,
        compile_pdf: args.pdf,
        policy: if args.reject_repeated {
            MembershipPolicy::RejectRepeatedStudies
        } else {
            MembershipPolicy::PoolRepeatedStudies
        },
        verbosity: args.verbose,
    })
}

/// Turns a rejected `--alpha` or `--which_delta` value into its own error.
fn classify(e: clap::Error) -> CliError {
    if e.kind() != ErrorKind::ValueValidation {
        return CliError::Usage(e);
    }
    let arg = match e.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => s.clone(),
        _ => return CliError::Usage(e),
    };
    let value = match e.get(ContextKind::InvalidValue) {
        Some(ContextValue::String(s)) => s.clone(),
        _ => String::new(),
    };
    if arg.starts_with("--alpha") {
        CliError::InvalidAlpha(value)
    } else if arg.starts_with("--which_delta") {
        CliError::InvalidKind(value)
    } else {
        CliError::Usage(e)
    }
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub analyzed: usize,
    pub skipped: usize,
    pub manifest: PathBuf,
}

/// Runs ingest, enumeration, analysis and reporting, writing the human
/// summary to `out`.
pub fn run(options: &CliOptions, out: &mut dyn Write) -> Result<RunSummary, CliError> {
    let path = &options.input_path;
    let bytes = fs::read(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    let table = parse_input(&bytes).map_err(|source| CliError::Parse {
        path: path.clone(),
        source,
    })?;
    info!("{}", summarize_table(&table));

    let set = enumerate_subgroups_with(&table, options.policy);
    let mut skipped: Vec<(SubgroupKey, String)> = set
        .skipped
        .iter()
        .map(|(k, r)| (k.clone(), r.to_string()))
        .collect();

    let outcomes: Vec<_> = set
        .subgroups
        .par_iter()
        .map(|sub| analyze_subgroup(sub, &options.config))
        .collect();
    let mut results = Vec::with_capacity(outcomes.len());
    for (sub, outcome) in set.subgroups.iter().zip(outcomes) {
        match outcome {
            Ok(r) => results.push(r),
            Err(e @ EngineError::ZeroPooledSd { .. }) => {
                warn!("skipping {}: {e}", sub.key());
                skipped.push((sub.key().clone(), e.to_string()));
            }
            Err(e) => return Err(CliError::Analysis(format!("subgroup {}: {e}", sub.key()))),
        }
    }
    skipped.sort_by(|a, b| a.0.cmp(&b.0));
    if results.is_empty() {
        return Err(CliError::Analysis(format!(
            "{}: no subgroup has at least 2 analyzable studies",
            path.display()
        )));
    }

    let manifest = write_outputs_with(
        &results,
        &skipped,
        &options.output_dir,
        &OutputOptions {
            compile_pdf: options.compile_pdf,
        },
    )?;

    let write_err = |source| CliError::Read {
        path: PathBuf::from("<stdout>"),
        source,
    };
    for (r, entry) in results.iter().zip(&manifest.subgroups) {
        writeln!(
            out,
            "{}: K={}, {}, mu = {} [{}, {}], p = {}",
            entry.name,
            r.k(),
            r.model(),
            sig6(r.mu()),
            sig6(r.ci_low()),
            sig6(r.ci_high()),
            sig6(r.p())
        )
        .map_err(write_err)?;
    }
    for s in &manifest.skipped {
        writeln!(out, "skipped {}: {}", s.name, s.reason).map_err(write_err)?;
    }
    let manifest_path = options.output_dir.join(MANIFEST_FILE);
    writeln!(out, "manifest: {}", manifest_path.display()).map_err(write_err)?;

    Ok(RunSummary {
        analyzed: results.len(),
        skipped: manifest.skipped.len(),
        manifest: manifest_path,
    })
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Entry point of the binary: parse, run, report errors on stderr.
pub fn main_with_args<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let options = match parse_args(argv) {
        Ok(o) => o,
        Err(CliError::Usage(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    init_logging(options.verbosity);
    let stdout = io::stdout();
    match run(&options, &mut stdout.lock()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
