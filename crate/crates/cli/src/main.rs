//! `kotoba` command-line front end.
//!
//! Exit codes: 0 success, 1 input or configuration error, 2 model backend error.
//! Diagnostics on stderr name files, lines and counts but never document text.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "kotoba", version, about = "Tokenizer, corpus curation and evaluation tooling for Japanese LLM work")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    /// Seed for every randomized component.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output style for the summary written to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a byte-fallback BPE tokenizer.
    TrainTokenizer(commands::tokenizer::TrainArgs),
    /// Add pieces learned from a corpus to a frozen base tokenizer.
    ExtendVocab(commands::tokenizer::ExtendArgs),
    /// Report the character-per-token rate of a tokenizer on a corpus.
    MeasureCpt(commands::tokenizer::CptArgs),
    /// Run the curation pipeline over a JSON-lines corpus.
    FilterCorpus(commands::corpus::FilterArgs),
    /// Fit the logistic quality model on labeled documents.
    FitQuality(commands::corpus::FitArgs),
    /// Evaluate a task suite or aggregate existing scores.
    Eval(commands::eval::EvalArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.workers {
        pool = pool.num_threads(n as usize);
    }
    let pool = pool.build().map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let global = cli.global;
    pool.install(|| match cli.command {
        Command::TrainTokenizer(args) => commands::tokenizer::train(&global, args),
        Command::ExtendVocab(args) => commands::tokenizer::extend(&global, args),
        Command::MeasureCpt(args) => commands::tokenizer::measure(&global, args),
        Command::FilterCorpus(args) => commands::corpus::filter(&global, args),
        Command::FitQuality(args) => commands::corpus::fit(&global, args),
        Command::Eval(args) => commands::eval::eval(&global, args),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Writes `text` to `path`, creating nothing but the file itself.
pub fn write_output(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
