use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::metrics::Segmenter;
use super::EvalError;

pub const SUITE_VERSION: u64 = 1;

static SLOT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{([A-Za-z_]+)\}").unwrap());

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    MultipleChoice,
    GenerateEm,
    GenerateRouge2,
}

impl TaskType {
    /// The only metric each task type may report.
    pub fn metric_name(self) -> &'static str {
        match self {
            TaskType::MultipleChoice => "acc",
            TaskType::GenerateEm => "em",
            TaskType::GenerateRouge2 => "rouge-2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    /// Question block; `{question}` is required, `{choices}` optional.
    pub prompt: String,
    /// Answer block appended after the prompt; must contain `{answer}`.
    #[serde(default = "default_answer")]
    pub answer: String,
    /// Joins exemplar blocks and the final question block.
    #[serde(default = "default_separator")]
    pub separator: String,
}

fn default_answer() -> String {
    " {answer}".into()
}

fn default_separator() -> String {
    "\n\n".into()
}

impl Template {
    pub fn new(prompt: impl Into<String>) -> Self {
        Template { prompt: prompt.into(), answer: default_answer(), separator: default_separator() }
    }

    fn check(&self) -> Result<(), EvalError> {
        check_slots(&self.prompt, &["question", "choices"], "question")?;
        check_slots(&self.answer, &["answer"], "answer")
    }

    fn render_question(&self, instance: &Instance) -> String {
        let choices: String =
            instance.choices.iter().enumerate().map(|(i, c)| format!("{}. {c}", i + 1)).collect::<Vec<_>>().join("\n");
        fill(&self.prompt, |slot| match slot {
            "question" => instance.question.clone(),
            _ => choices.clone(),
        })
    }

    /// The continuation scored or generated after a question block.
    pub fn render_answer(&self, answer: &str) -> String {
        fill(&self.answer, |_| answer.to_string())
    }
}

fn check_slots(template: &str, allowed: &[&str], required: &str) -> Result<(), EvalError> {
    let mut found = false;
    for cap in SLOT.captures_iter(template) {
        let name = &cap[1];
        if !allowed.contains(&name) {
            return Err(EvalError::Template(format!("unknown slot {{{name}}} in {template:?}")));
        }
        found |= name == required;
    }
    if found { Ok(()) } else { Err(EvalError::Template(format!("slot {{{required}}} missing from {template:?}"))) }
}

fn fill(template: &str, value: impl Fn(&str) -> String) -> String {
    SLOT.replace_all(template, |cap: &regex::Captures| value(&cap[1])).into_owned()
}

/// One evaluated item. Multiple-choice rows carry `choices` and
/// `gold_index`; generation rows carry `references`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    #[serde(default)]
    pub id: String,
    pub question: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub choices: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_index: Option<usize>,
}

impl Instance {
    pub fn multiple_choice(id: &str, question: &str, choices: &[&str], gold_index: usize) -> Self {
        Instance {
            id: id.into(),
            question: question.into(),
            choices: choices.iter().map(|c| c.to_string()).collect(),
            references: Vec::new(),
            gold_index: Some(gold_index),
        }
    }

    pub fn generation(id: &str, question: &str, references: &[&str]) -> Self {
        Instance {
            id: id.into(),
            question: question.into(),
            choices: Vec::new(),
            references: references.iter().map(|r| r.to_string()).collect(),
            gold_index: None,
        }
    }

    pub fn validate(&self, task_type: TaskType) -> Result<(), EvalError> {
        let bad = |m: &str| Err(EvalError::Instance { id: self.id.clone(), message: m.into() });
        match task_type {
            TaskType::MultipleChoice => {
                if self.choices.len() < 2 {
                    return bad("multiple choice needs at least two choices");
                }
                match self.gold_index {
                    Some(g) if g < self.choices.len() => Ok(()),
                    Some(_) => bad("gold_index out of range"),
                    None => bad("gold_index missing"),
                }
            }
            _ if self.references.is_empty() => bad("references must be non-empty"),
            _ => Ok(()),
        }
    }

    /// Answer text used when the instance serves as an exemplar.
    pub fn answer_text(&self) -> &str {
        match self.gold_index {
            Some(g) => &self.choices[g],
            None => &self.references[0],
        }
    }
}

fn default_stops() -> Vec<String> {
    vec!["\n\n".into()]
}

fn default_max_new_tokens() -> usize {
    256
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    pub task_type: TaskType,
    pub n_shots: usize,
    pub template: Template,
    #[serde(default)]
    pub exemplars: Vec<Instance>,
    /// JSON-lines exemplar file, resolved against the suite's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exemplars_file: Option<PathBuf>,
    /// JSON-lines instance file, resolved against the suite's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    pub metric_name: String,
    #[serde(default)]
    pub excluded_from_7avg: bool,
    #[serde(default = "default_stops")]
    pub stop_sequences: Vec<String>,
    #[serde(default = "default_max_new_tokens")]
    pub max_new_tokens: usize,
    /// Divide each choice's loglikelihood by its UTF-8 byte length.
    #[serde(default)]
    pub length_normalize: bool,
    #[serde(default)]
    pub segmenter: Segmenter,
}

impl TaskSpec {
    pub fn new(name: &str, task_type: TaskType, n_shots: usize, template: Template) -> Self {
        TaskSpec {
            name: name.into(),
            task_type,
            n_shots,
            template,
            exemplars: Vec::new(),
            exemplars_file: None,
            data: None,
            metric_name: task_type.metric_name().into(),
            excluded_from_7avg: false,
            stop_sequences: default_stops(),
            max_new_tokens: default_max_new_tokens(),
            length_normalize: false,
            segmenter: Segmenter::default(),
        }
    }

    pub fn with_exemplars(mut self, exemplars: Vec<Instance>) -> Self {
        self.exemplars = exemplars;
        self
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: String| Err(EvalError::Task { task: self.name.clone(), message: m });
        if self.name.is_empty() {
            return bad("name must be non-empty".into());
        }
        if self.metric_name != self.task_type.metric_name() {
            return bad(format!("metric {:?} does not match task type (expected {:?})", self.metric_name, self.task_type.metric_name()));
        }
        if self.excluded_from_7avg && self.task_type != TaskType::GenerateRouge2 {
            return bad("only summarization tasks may be excluded from the 7-task average".into());
        }
        self.template.check()?;
        for ex in &self.exemplars {
            ex.validate(self.task_type)?;
        }
        Ok(())
    }
}

/// Renders the first `n` exemplars as full question-answer blocks followed by
/// the instance's question block with the answer slot left empty.
pub fn build_nshot_prompt(task: &TaskSpec, instance: &Instance, n: usize) -> Result<String, EvalError> {
    task.template.check()?;
    if n > task.exemplars.len() {
        return Err(EvalError::InsufficientExemplars { task: task.name.clone(), needed: n, available: task.exemplars.len() });
    }
    let shots = &task.exemplars[..n];
    if shots.iter().any(|ex| ex.question == instance.question && ex.choices == instance.choices) {
        return Err(EvalError::Task { task: task.name.clone(), message: format!("instance {:?} is also an exemplar", instance.id) });
    }
    let mut blocks: Vec<String> = shots
        .iter()
        .map(|ex| task.template.render_question(ex) + &task.template.render_answer(ex.answer_text()))
        .collect();
    blocks.push(task.template.render_question(instance));
    Ok(blocks.join(&task.template.separator))
}

/// Reads JSON-lines instances. Missing ids become `"<line>"`.
pub fn read_instances(path: &Path, task_type: TaskType) -> Result<Vec<Instance>, EvalError> {
    let file = fs::File::open(path).map_err(|e| EvalError::Io { path: path.to_path_buf(), source: e })?;
    let mut out = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| EvalError::Io { path: path.to_path_buf(), source: e })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut inst: Instance = serde_json::from_str(&line)
            .map_err(|e| EvalError::Parse { path: path.to_path_buf(), message: format!("line {}: {e}", idx + 1) })?;
        if inst.id.is_empty() {
            inst.id = (idx + 1).to_string();
        }
        inst.validate(task_type)?;
        out.push(inst);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub version: u64,
    pub name: String,
    pub tasks: Vec<TaskSpec>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Suite {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, EvalError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| EvalError::Parse { path: base_dir.to_path_buf(), message: e.to_string() })?;
        match value.get("version").and_then(serde_json::Value::as_u64) {
            Some(SUITE_VERSION) => {}
            Some(v) => return Err(EvalError::UnsupportedVersion(v)),
            None => return Err(EvalError::Parse { path: base_dir.to_path_buf(), message: "missing integer field `version`".into() }),
        }
        let mut suite: Suite = serde_json::from_value(value)
            .map_err(|e| EvalError::Parse { path: base_dir.to_path_buf(), message: e.to_string() })?;
        suite.base_dir = base_dir.to_path_buf();
        if suite.tasks.is_empty() {
            return Err(EvalError::EmptySuite);
        }
        for task in &suite.tasks {
            task.validate()?;
        }
        Ok(suite)
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let text = fs::read_to_string(path).map_err(|e| EvalError::Io { path: path.to_path_buf(), source: e })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Suite::from_json(&text, dir)
    }

    pub fn resolve(&self, relative: &Path) -> PathBuf {
        self.base_dir.join(relative)
    }

    /// Loads file-referenced exemplars into each task and checks shot counts.
    pub fn load_exemplars(&mut self) -> Result<(), EvalError> {
        for i in 0..self.tasks.len() {
            if let Some(file) = self.tasks[i].exemplars_file.clone() {
                let path = self.resolve(&file);
                let task = &mut self.tasks[i];
                task.exemplars.extend(read_instances(&path, task.task_type)?);
            }
            let task = &self.tasks[i];
            if task.n_shots > task.exemplars.len() {
                return Err(EvalError::InsufficientExemplars { task: task.name.clone(), needed: task.n_shots, available: task.exemplars.len() });
            }
        }
        Ok(())
    }
}
