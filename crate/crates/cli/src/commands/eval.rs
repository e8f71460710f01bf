use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use kotoba_core::eval::{
    aggregate, read_instances, run_task, EvalError, HttpConfig, HttpScorer, MetricResult, MockScorer, ModelScorer, RunOptions,
    Suite, SuiteReport,
};

use crate::error::CliError;
use crate::io::{load_tokenizer, read_string};
use crate::{write_output, Format, GlobalArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScorerKind {
    Mock,
    Http,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Suite definition (JSON).
    #[arg(long, required_unless_present = "aggregate_only")]
    suite: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ScorerKind::Mock)]
    scorer: ScorerKind,
    /// Mock scorer definition, required with `--scorer mock`.
    #[arg(long)]
    mock: Option<PathBuf>,
    /// Tokenizer for a unigram mock; byte-level when omitted.
    #[arg(long)]
    tokenizer: Option<PathBuf>,
    /// Scorer endpoint; the KOTOBA_SCORER_URL variable takes precedence.
    #[arg(long)]
    url: Option<String>,
    #[arg(long, default_value_t = 30_000)]
    timeout_ms: u64,
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// Score failed instances as incorrect instead of stopping.
    #[arg(long)]
    lenient: bool,
    /// Directory that task data paths are resolved against; defaults to the suite's directory.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip scoring and aggregate the results in this file.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["scorer", "mock", "url", "lenient", "data_dir"])]
    aggregate_only: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResultsFile {
    version: u64,
    #[serde(default)]
    suite: String,
    results: Vec<MetricResult>,
}

pub fn eval(global: &GlobalArgs, args: EvalArgs) -> Result<(), CliError> {
    let report = match &args.aggregate_only {
        Some(path) => aggregate_file(path)?,
        None => run_suite(&args)?,
    };
    if let Some(path) = &args.out {
        write_output(path, &report.to_json())?;
    }
    match global.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Table => print!("{}", report.to_table()),
    }
    Ok(())
}

fn aggregate_file(path: &Path) -> Result<SuiteReport, CliError> {
    let text = read_string(path)?;
    let bad = |m: String| CliError::Input(format!("{}: {m}", path.display()));
    let file: ResultsFile = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if file.version != 1 {
        return Err(bad(format!("unsupported version {}", file.version)));
    }
    Ok(aggregate(&file.results)?.with_suite(&file.suite))
}

fn build_scorer(args: &EvalArgs) -> Result<Box<dyn ModelScorer>, CliError> {
    match args.scorer {
        ScorerKind::Mock => {
            let path = args.mock.as_ref().ok_or_else(|| CliError::Input("--scorer mock needs --mock FILE".into()))?;
            let tokenizer = args.tokenizer.as_deref().map(load_tokenizer).transpose()?;
            Ok(Box::new(MockScorer::load(path, tokenizer)?))
        }
        ScorerKind::Http => {
            let url = HttpConfig::resolve_url(args.url.as_deref()).ok_or_else(|| {
                CliError::Input(format!("--scorer http needs --url or the {} environment variable", HttpConfig::URL_ENV))
            })?;
            Ok(Box::new(HttpScorer::new(HttpConfig {
                url,
                timeout: Duration::from_millis(args.timeout_ms),
                retries: args.retries,
            })))
        }
    }
}

fn run_suite(args: &EvalArgs) -> Result<SuiteReport, CliError> {
    let suite_path = args.suite.as_ref().expect("clap requires --suite here");
    let mut suite = Suite::load(suite_path)?;
    suite.load_exemplars()?;
    let data_dir = args.data_dir.clone().unwrap_or_else(|| suite.base_dir.clone());
    let scorer = build_scorer(args)?;

    let mut results = Vec::with_capacity(suite.tasks.len());
    for task in &suite.tasks {
        let data = task
            .data
            .as_ref()
            .ok_or_else(|| EvalError::Task { task: task.name.clone(), message: "no data file".into() })?;
        let instances = read_instances(&data_dir.join(data), task.task_type)?;
        let run = run_task(scorer.as_ref(), task, &instances, RunOptions { lenient: args.lenient })?;
        if run.failures() > 0 {
            eprintln!("warning: {}: {} of {} instances failed and were scored as incorrect", task.name, run.failures(), instances.len());
        }
        results.push(run.result);
    }
    Ok(aggregate(&results)?.with_suite(&suite.name))
}
