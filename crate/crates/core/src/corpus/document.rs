use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    #[serde(rename = "id")]
    pub doc_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, Value>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Document { doc_id: doc_id.into(), text: text.into(), meta: BTreeMap::new() }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("document serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Normalize,
    Pii,
    ExactDedup,
    NearDedup,
    Heuristics,
    Classifier,
}

impl Stage {
    /// Fixed execution order.
    pub const ALL: [Stage; 6] =
        [Stage::Normalize, Stage::Pii, Stage::ExactDedup, Stage::NearDedup, Stage::Heuristics, Stage::Classifier];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Normalize => "normalize",
            Stage::Pii => "pii",
            Stage::ExactDedup => "exact_dedup",
            Stage::NearDedup => "near_dedup",
            Stage::Heuristics => "heuristics",
            Stage::Classifier => "classifier",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Kept,
    Dropped,
    Modified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub doc_id: String,
    pub stage: Stage,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub reason: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, Value>,
}

impl StageOutcome {
    pub fn kept(doc_id: &str, stage: Stage) -> Self {
        StageOutcome { doc_id: doc_id.to_string(), stage, verdict: Verdict::Kept, reason: String::new(), detail: BTreeMap::new() }
    }

    pub fn modified(doc_id: &str, stage: Stage) -> Self {
        StageOutcome { verdict: Verdict::Modified, ..StageOutcome::kept(doc_id, stage) }
    }

    pub fn dropped(doc_id: &str, stage: Stage, reason: impl Into<String>) -> Self {
        let reason = reason.into();
        debug_assert!(!reason.is_empty());
        StageOutcome { verdict: Verdict::Dropped, reason, ..StageOutcome::kept(doc_id, stage) }
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = reason.into();
        self
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.detail.insert(key.to_string(), value.into());
        self
    }

    pub fn is_dropped(&self) -> bool {
        self.verdict == Verdict::Dropped
    }
}

/// A JSON-lines record that could not be turned into a [`Document`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

impl RecordError {
    /// Placeholder id used for outcomes of unreadable records.
    pub fn record_id(&self) -> String {
        format!("line:{}", self.line)
    }
}

pub type Record = Result<Document, RecordError>;

/// Parses one JSON-lines record; `line` is 1-based.
pub fn parse_record(line: usize, raw: &str) -> Record {
    serde_json::from_str::<Document>(raw).map_err(|e| RecordError { line, message: e.to_string() })
}

/// Reads a JSON-lines stream. Blank lines are skipped; I/O errors and
/// malformed lines become [`RecordError`]s so the caller can keep going.
pub fn read_jsonl<R: BufRead>(reader: R) -> impl Iterator<Item = Record> {
    reader.lines().enumerate().filter_map(|(idx, line)| match line {
        Ok(raw) if raw.trim().is_empty() => None,
        Ok(raw) => Some(parse_record(idx + 1, &raw)),
        Err(e) => Some(Err(RecordError { line: idx + 1, message: e.to_string() })),
    })
}

pub fn write_jsonl<'a, W: Write>(mut writer: W, docs: impl IntoIterator<Item = &'a Document>) -> std::io::Result<()> {
    for doc in docs {
        writeln!(writer, "{}", doc.to_json_line())?;
    }
    writer.flush()
}
