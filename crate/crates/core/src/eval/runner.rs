use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{exact_match, rouge2};
use super::scorer::{ModelScorer, ScorerError};
use super::task::{build_nshot_prompt, Instance, TaskSpec, TaskType};
use super::EvalError;

pub const REPORT_VERSION: u64 = 1;

/// Scores every choice as a continuation of `prompt` and returns the argmax,
/// lowest index first on ties.
pub fn score_multiple_choice<S: AsRef<str>>(
    scorer: &dyn ModelScorer,
    prompt: &str,
    choices: &[S],
) -> Result<(usize, Vec<f64>), EvalError> {
    score_choices(scorer, prompt, choices, false)
}

fn score_choices<S: AsRef<str>>(
    scorer: &dyn ModelScorer,
    prompt: &str,
    continuations: &[S],
    length_normalize: bool,
) -> Result<(usize, Vec<f64>), EvalError> {
    if continuations.len() < 2 {
        return Err(EvalError::Instance { id: String::new(), message: "multiple choice needs at least two choices".into() });
    }
    let mut scores = Vec::with_capacity(continuations.len());
    for (i, c) in continuations.iter().enumerate() {
        let c = c.as_ref();
        let ll = scorer.loglikelihood(prompt, c).map_err(|source| EvalError::Choice { choice: i, source })?;
        if !ll.is_finite() {
            return Err(EvalError::Choice { choice: i, source: ScorerError::NonFinite });
        }
        scores.push(if length_normalize { ll / c.len().max(1) as f64 } else { ll });
    }
    Ok((argmax(&scores), scores))
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Cuts generated text at the earliest stop sequence.
pub fn truncate_at_stop<'a>(text: &'a str, stops: &[String]) -> &'a str {
    let end = stops.iter().filter(|s| !s.is_empty()).filter_map(|s| text.find(s.as_str())).min().unwrap_or(text.len());
    &text[..end]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricResult {
    pub task_name: String,
    pub metric_name: String,
    #[serde(default)]
    pub n_shots: usize,
    /// On the 0-100 scale.
    pub value: f64,
    /// Zero when the value was supplied directly rather than measured.
    #[serde(default)]
    pub instance_count: usize,
    #[serde(default)]
    pub excluded_from_7avg: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub id: String,
    /// 1/0 for accuracy and exact match, ROUGE-2 F1 otherwise.
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskRun {
    pub result: MetricResult,
    pub instances: Vec<InstanceOutcome>,
}

impl TaskRun {
    pub fn failures(&self) -> usize {
        self.instances.iter().filter(|i| i.error.is_some()).count()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Count scorer failures as incorrect instead of aborting.
    pub lenient: bool,
}

fn evaluate_one(scorer: &dyn ModelScorer, task: &TaskSpec, inst: &Instance) -> Result<InstanceOutcome, EvalError> {
    let prompt = build_nshot_prompt(task, inst, task.n_shots)?;
    let outcome = |score: f64, prediction: String| InstanceOutcome { id: inst.id.clone(), score, prediction: Some(prediction), error: None };
    match task.task_type {
        TaskType::MultipleChoice => {
            let continuations: Vec<String> = inst.choices.iter().map(|c| task.template.render_answer(c)).collect();
            let (chosen, _) = score_choices(scorer, &prompt, &continuations, task.length_normalize)?;
            let correct = Some(chosen) == inst.gold_index;
            Ok(outcome(if correct { 1.0 } else { 0.0 }, chosen.to_string()))
        }
        TaskType::GenerateEm | TaskType::GenerateRouge2 => {
            let raw = scorer
                .generate(&prompt, &task.stop_sequences, task.max_new_tokens)
                .map_err(|source| EvalError::Scorer { task: task.name.clone(), instance: inst.id.clone(), source })?;
            let text = truncate_at_stop(&raw, &task.stop_sequences).to_string();
            let score = if task.task_type == TaskType::GenerateEm {
                if exact_match(&text, &inst.references) { 1.0 } else { 0.0 }
            } else {
                rouge2(&text, &inst.references[0], task.segmenter)
            };
            Ok(outcome(score, text))
        }
    }
}

fn attach_instance(err: EvalError, task: &TaskSpec, inst: &Instance) -> EvalError {
    match err {
        EvalError::Choice { choice, source } => EvalError::Scorer {
            task: task.name.clone(),
            instance: format!("{} (choice {choice})", inst.id),
            source,
        },
        other => other,
    }
}

/// Evaluates every instance and reports the task metric on the 0-100 scale.
/// Instances run in parallel unless the scorer declares itself single-threaded;
/// the reduction is always in instance order.
pub fn run_task(scorer: &dyn ModelScorer, task: &TaskSpec, instances: &[Instance], options: RunOptions) -> Result<TaskRun, EvalError> {
    task.validate()?;
    if instances.is_empty() {
        return Err(EvalError::Task { task: task.name.clone(), message: "no instances".into() });
    }
    for inst in instances {
        inst.validate(task.task_type)?;
    }
    let eval = |inst: &Instance| -> Result<InstanceOutcome, EvalError> {
        match evaluate_one(scorer, task, inst) {
            Ok(o) => Ok(o),
            Err(e @ (EvalError::Scorer { .. } | EvalError::Choice { .. })) if options.lenient => {
                Ok(InstanceOutcome { id: inst.id.clone(), score: 0.0, prediction: None, error: Some(attach_instance(e, task, inst).to_string()) })
            }
            Err(e) => Err(attach_instance(e, task, inst)),
        }
    };
    let outcomes: Vec<InstanceOutcome> = if scorer.is_thread_safe() {
        instances.par_iter().map(eval).collect::<Result<_, _>>()?
    } else {
        instances.iter().map(eval).collect::<Result<_, _>>()?
    };
    let total: f64 = outcomes.iter().map(|o| o.score).sum();
    let result = MetricResult {
        task_name: task.name.clone(),
        metric_name: task.metric_name.clone(),
        n_shots: task.n_shots,
        value: 100.0 * total / outcomes.len() as f64,
        instance_count: outcomes.len(),
        excluded_from_7avg: task.excluded_from_7avg,
    };
    Ok(TaskRun { result, instances: outcomes })
}

/// Half-up rounding to two decimals, used only for display.
pub fn round_half_up(x: f64) -> f64 {
    centi_units(x) as f64 / 100.0
}

/// `x` in hundredths after half-up rounding. The epsilon absorbs binary
/// representation error such as 62.825 being stored just below the half.
pub fn centi_units(x: f64) -> i64 {
    (x * 100.0 + 0.5 + 1e-9).floor() as i64
}

pub fn format_value(x: f64) -> String {
    let c = centi_units(x);
    format!("{}{}.{:02}", if c < 0 { "-" } else { "" }, c.abs() / 100, c.abs() % 100)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteReport {
    pub version: u64,
    #[serde(default)]
    pub suite: String,
    pub results: Vec<MetricResult>,
    pub avg: f64,
    /// Mean over tasks not excluded; present when any task is excluded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub avg_excl: Option<f64>,
}

/// Unweighted means over all tasks and over non-excluded tasks.
pub fn aggregate(results: &[MetricResult]) -> Result<SuiteReport, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyResults);
    }
    for r in results {
        if !(r.value.is_finite() && (0.0..=100.0).contains(&r.value)) {
            return Err(EvalError::Task { task: r.task_name.clone(), message: format!("value {} outside [0, 100]", r.value) });
        }
    }
    let mean = |vals: &[f64]| vals.iter().sum::<f64>() / vals.len() as f64;
    let all: Vec<f64> = results.iter().map(|r| r.value).collect();
    let kept: Vec<f64> = results.iter().filter(|r| !r.excluded_from_7avg).map(|r| r.value).collect();
    let avg_excl = if kept.len() == all.len() {
        None
    } else if kept.is_empty() {
        return Err(EvalError::EmptyResults);
    } else {
        Some(mean(&kept))
    };
    Ok(SuiteReport { version: REPORT_VERSION, suite: String::new(), results: results.to_vec(), avg: mean(&all), avg_excl })
}

impl SuiteReport {
    pub fn with_suite(mut self, name: &str) -> Self {
        self.suite = name.into();
        self
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| EvalError::Report(e.to_string()))?;
        match value.get("version").and_then(serde_json::Value::as_u64) {
            Some(REPORT_VERSION) => {}
            Some(v) => return Err(EvalError::UnsupportedVersion(v)),
            None => return Err(EvalError::Report("missing integer field `version`".into())),
        }
        serde_json::from_value(value).map_err(|e| EvalError::Report(e.to_string()))
    }

    /// One row per task followed by the averages, values display-rounded.
    pub fn to_table(&self) -> String {
        let width = self.results.iter().map(|r| r.task_name.chars().count()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:<7}  {:>5}  {:>6}", "task", "metric", "shots", "value");
        for r in &self.results {
            let name = if r.excluded_from_7avg { format!("{}*", r.task_name) } else { r.task_name.clone() };
            let _ = writeln!(out, "{:<width$}  {:<7}  {:>5}  {:>6}", name, r.metric_name, r.n_shots, format_value(r.value));
        }
        let _ = writeln!(out, "{:<width$}  {:<7}  {:>5}  {:>6}", "Avg", "", "", format_value(self.avg));
        if let Some(excl) = self.avg_excl {
            let label = format!("{}-Avg", self.results.iter().filter(|r| !r.excluded_from_7avg).count());
            let _ = writeln!(out, "{:<width$}  {:<7}  {:>5}  {:>6}", label, "", "", format_value(excl));
        }
        out
    }
}
