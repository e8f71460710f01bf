//! Evaluation harness: likelihood multiple choice, normalized exact match,
//! ROUGE-2, n-shot prompts and suite aggregation.

mod metrics;
mod runner;
mod scorer;
mod task;

use std::path::PathBuf;

pub use metrics::{exact_match, normalize_answer, rouge2, rouge2_units, Segmenter};
pub use runner::{
    aggregate, centi_units, format_value, round_half_up, run_task, score_multiple_choice, truncate_at_stop, InstanceOutcome,
    MetricResult, RunOptions, SuiteReport, TaskRun, REPORT_VERSION,
};
pub use scorer::{GenerationEntry, HttpConfig, HttpScorer, LoglikelihoodEntry, MockScorer, MockSpec, ModelScorer, ScorerError};
pub use task::{build_nshot_prompt, read_instances, Instance, Suite, TaskSpec, TaskType, Template, SUITE_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("task {task}: {message}")]
    Task { task: String, message: String },
    #[error("instance {id}: {message}")]
    Instance { id: String, message: String },
    #[error("template: {0}")]
    Template(String),
    #[error("task {task} needs {needed} exemplars but has {available}")]
    InsufficientExemplars { task: String, needed: usize, available: usize },
    #[error("choice {choice}: {source}")]
    Choice { choice: usize, source: ScorerError },
    #[error("task {task}, instance {instance}: {source}")]
    Scorer { task: String, instance: String, source: ScorerError },
    #[error("no results to aggregate")]
    EmptyResults,
    #[error("suite has no tasks")]
    EmptySuite,
    #[error("invalid report: {0}")]
    Report(String),
    #[error("unsupported artifact version {0}")]
    UnsupportedVersion(u64),
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl EvalError {
    /// True when the failure came from the model backend rather than the inputs.
    pub fn is_backend(&self) -> bool {
        matches!(self, EvalError::Choice { .. } | EvalError::Scorer { .. })
    }
}
