use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::config::PipelineConfig;
use super::dedup::{dedup_exact, dedup_near};
use super::document::{Document, Record, Stage, StageOutcome, Verdict};
use super::heuristics::heuristic_filters;
use super::normalize::normalize_document;
use super::pii::PiiRedactor;
use super::quality::{classify_quality, QualityModel};
use super::CorpusError;
use crate::tokenizer::Tokenizer;

pub const REPORT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageCounts {
    pub stage: Stage,
    pub enabled: bool,
    pub seen: u64,
    pub kept: u64,
    pub dropped: u64,
    /// Subset of `kept` whose text changed.
    pub modified: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineReport {
    pub version: u64,
    pub total_documents_in: u64,
    pub stages: Vec<StageCounts>,
    pub total_documents_out: u64,
    pub total_tokens_out: u64,
    pub redactions: BTreeMap<String, u64>,
}

impl PipelineReport {
    pub fn stage(&self, stage: Stage) -> &StageCounts {
        self.stages.iter().find(|c| c.stage == stage).expect("every stage is reported")
    }

    pub fn total_dropped(&self) -> u64 {
        self.stages.iter().map(|c| c.dropped).sum()
    }

    pub fn total_redactions(&self) -> u64 {
        self.redactions.values().sum()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CorpusError::Report(e.to_string()))?;
        match value.get("version").and_then(Value::as_u64) {
            Some(REPORT_VERSION) => {}
            Some(v) => return Err(CorpusError::UnsupportedVersion(v)),
            None => return Err(CorpusError::Report("missing integer field `version`".into())),
        }
        serde_json::from_value(value).map_err(|e| CorpusError::Report(e.to_string()))
    }

    /// Checks conservation within each stage and chaining between stages.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut expected_seen = self.total_documents_in;
        for c in &self.stages {
            if c.seen != expected_seen {
                return Err(format!("{}: seen {} but previous stage kept {}", c.stage.name(), c.seen, expected_seen));
            }
            if c.seen != c.kept + c.dropped {
                return Err(format!("{}: seen {} != kept {} + dropped {}", c.stage.name(), c.seen, c.kept, c.dropped));
            }
            if c.modified > c.kept {
                return Err(format!("{}: modified {} exceeds kept {}", c.stage.name(), c.modified, c.kept));
            }
            expected_seen = c.kept;
        }
        if expected_seen != self.total_documents_out {
            return Err(format!("last stage kept {expected_seen} but {} documents out", self.total_documents_out));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub documents: Vec<Document>,
    pub report: PipelineReport,
    /// Every outcome, grouped by stage in execution order and by input order within a stage.
    pub outcomes: Vec<StageOutcome>,
}

pub struct Pipeline {
    config: PipelineConfig,
    redactor: PiiRedactor,
    tokenizer: Tokenizer,
    model: Option<QualityModel>,
    annotate: bool,
}

impl Pipeline {
    /// The classifier stage needs a model when enabled; the config's
    /// threshold, if any, overrides the model's own.
    pub fn new(config: PipelineConfig, tokenizer: Tokenizer, model: Option<QualityModel>) -> Result<Self, CorpusError> {
        config.validate()?;
        let redactor = PiiRedactor::new(&config.pii_patterns).map_err(|e| CorpusError::Config(vec![format!("pii_patterns: {e}")]))?;
        let model = match (model, config.classifier_threshold) {
            (Some(m), Some(t)) => Some(m.with_threshold(t)?),
            (m, _) => m,
        };
        if config.stages.classifier && model.is_none() {
            return Err(CorpusError::Config(vec!["stages.classifier is enabled but no quality model was supplied".into()]));
        }
        Ok(Pipeline { config, redactor, tokenizer, model, annotate: false })
    }

    /// Adds `meta.pipeline` with the per-stage verdicts to every surviving document.
    pub fn with_annotations(mut self, annotate: bool) -> Self {
        self.annotate = annotate;
        self
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn run(&self, records: impl IntoIterator<Item = Record>) -> PipelineOutput {
        let mut outcomes = Vec::new();
        let mut counts: Vec<StageCounts> = Stage::ALL
            .iter()
            .map(|&stage| StageCounts { stage, enabled: self.config.stages.enabled(stage), seen: 0, kept: 0, dropped: 0, modified: 0 })
            .collect();
        let mut redactions = BTreeMap::new();

        // Decoding and id checks are accounted to the normalize stage.
        let mut docs = Vec::new();
        let mut rejected = Vec::new();
        let mut ids = HashSet::new();
        let mut total_in = 0u64;
        for record in records {
            total_in += 1;
            match record {
                Err(e) => rejected.push(StageOutcome::dropped(&e.record_id(), Stage::Normalize, "decode failure").with_detail("error", e.message)),
                Ok(doc) if doc.doc_id.is_empty() => {
                    rejected.push(StageOutcome::dropped(&format!("line:{total_in}"), Stage::Normalize, "decode failure").with_detail("error", "empty id"))
                }
                Ok(doc) if !ids.insert(doc.doc_id.clone()) => {
                    rejected.push(StageOutcome::dropped(&doc.doc_id, Stage::Normalize, "duplicate id"))
                }
                Ok(doc) => docs.push(doc),
            }
        }

        let mut trail: Vec<Map<String, Value>> = vec![Map::new(); docs.len()];
        // Position in `trail` for every live document.
        let mut slots: Vec<usize> = (0..docs.len()).collect();

        for (si, &stage) in Stage::ALL.iter().enumerate() {
            let c = &mut counts[si];
            c.seen = docs.len() as u64;
            let stage_outcomes: Vec<StageOutcome> = if !c.enabled {
                Vec::new()
            } else {
                let (next, produced) = self.apply(stage, std::mem::take(&mut docs), &mut redactions);
                docs = next;
                produced
            };
            if stage == Stage::Normalize {
                c.seen += rejected.len() as u64;
                c.dropped += rejected.len() as u64;
                outcomes.append(&mut rejected);
            }
            if c.enabled {
                let mut survivors = Vec::with_capacity(slots.len());
                for (slot, outcome) in slots.iter().zip(&stage_outcomes) {
                    trail[*slot].insert(stage.name().to_string(), Value::from(verdict_name(outcome.verdict)));
                    match outcome.verdict {
                        Verdict::Dropped => c.dropped += 1,
                        Verdict::Modified => c.modified += 1,
                        Verdict::Kept => {}
                    }
                    if !outcome.is_dropped() {
                        survivors.push(*slot);
                    }
                }
                slots = survivors;
                outcomes.extend(stage_outcomes);
            }
            c.kept = c.seen - c.dropped;
        }

        let total_tokens_out: u64 = docs.par_iter().map(|d| self.tokenizer.encode(&d.text).len() as u64).sum();
        if self.annotate {
            for (doc, slot) in docs.iter_mut().zip(&slots) {
                doc.meta.insert("pipeline".to_string(), Value::Object(std::mem::take(&mut trail[*slot])));
            }
        }
        let report = PipelineReport {
            version: REPORT_VERSION,
            total_documents_in: total_in,
            stages: counts,
            total_documents_out: docs.len() as u64,
            total_tokens_out,
            redactions,
        };
        debug_assert_eq!(report.check_invariants(), Ok(()));
        PipelineOutput { documents: docs, report, outcomes }
    }

    fn apply(
        &self,
        stage: Stage,
        docs: Vec<Document>,
        redactions: &mut BTreeMap<String, u64>,
    ) -> (Vec<Document>, Vec<StageOutcome>) {
        match stage {
            Stage::Normalize => docs.into_par_iter().map(normalize_document).unzip(),
            Stage::Pii => {
                let results: Vec<_> = docs.into_par_iter().map(|d| self.redactor.redact_document(d)).collect();
                let mut out = Vec::with_capacity(results.len());
                let mut outs = Vec::with_capacity(results.len());
                for (doc, outcome, found) in results {
                    for (category, n) in found {
                        *redactions.entry(category).or_insert(0) += n;
                    }
                    out.push(doc);
                    outs.push(outcome);
                }
                (out, outs)
            }
            Stage::ExactDedup => dedup_exact(docs),
            Stage::NearDedup => dedup_near(docs, &self.config.near_dup),
            Stage::Heuristics => {
                let outs: Vec<StageOutcome> = docs.par_iter().map(|d| heuristic_filters(d, &self.config.heuristics)).collect();
                retain_kept(docs, outs)
            }
            Stage::Classifier => {
                let model = self.model.as_ref().expect("checked in Pipeline::new");
                let outs: Vec<StageOutcome> = docs.par_iter().map(|d| classify_quality(d, model).1).collect();
                retain_kept(docs, outs)
            }
        }
    }
}

fn retain_kept(docs: Vec<Document>, outcomes: Vec<StageOutcome>) -> (Vec<Document>, Vec<StageOutcome>) {
    let kept = docs.into_iter().zip(&outcomes).filter(|(_, o)| !o.is_dropped()).map(|(d, _)| d).collect();
    (kept, outcomes)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Kept => "kept",
        Verdict::Dropped => "dropped",
        Verdict::Modified => "modified",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::config::StageToggles;
    use crate::corpus::document::RecordError;
    use crate::tokenizer::Normalization;

    fn pipeline(config: PipelineConfig) -> Pipeline {
        Pipeline::new(config, Tokenizer::byte_level(Normalization::Nfkc), None).unwrap()
    }

    fn records(texts: &[&str]) -> Vec<Record> {
        texts.iter().enumerate().map(|(i, t)| Ok(Document::new(format!("d{i}"), *t))).collect()
    }

    #[test]
    fn empty_stream() {
        let out = pipeline(PipelineConfig::default()).run(Vec::new());
        assert!(out.documents.is_empty());
        assert_eq!(out.report.total_tokens_out, 0);
        assert!(out.report.stages.iter().all(|c| c.seen == 0 && c.kept == 0 && c.dropped == 0));
    }

    #[test]
    fn all_disabled_is_identity() {
        let config = PipelineConfig { stages: StageToggles::none(), ..PipelineConfig::default() };
        let out = pipeline(config).run(records(&["ab\r\n", "ab\r\n", "é"]));
        assert_eq!(out.documents.len(), 3);
        assert_eq!(out.documents[0].text, "ab\r\n");
        // Byte-level tokens equal UTF-8 bytes.
        assert_eq!(out.report.total_tokens_out, 4 + 4 + 2);
        out.report.check_invariants().unwrap();
    }

    #[test]
    fn decode_failures_and_duplicate_ids() {
        let recs = vec![
            Ok(Document::new("a", "x")),
            Err(RecordError { line: 2, message: "bad".into() }),
            Ok(Document::new("a", "y")),
        ];
        let config = PipelineConfig { stages: StageToggles::only(&[Stage::Normalize]), ..PipelineConfig::default() };
        let out = pipeline(config).run(recs);
        assert_eq!(out.documents.len(), 1);
        let n = out.report.stage(Stage::Normalize);
        assert_eq!((n.seen, n.kept, n.dropped), (3, 1, 2));
        assert_eq!(out.outcomes[0].reason, "decode failure");
        assert_eq!(out.outcomes[0].doc_id, "line:2");
        out.report.check_invariants().unwrap();
    }

    #[test]
    fn annotations_and_report_round_trip() {
        let text = "東京都は十九日、新たな交通計画を発表した。連絡先は info@example.com です。計画では都心部の路線バスを順次切り替える。";
        let out = pipeline(PipelineConfig::default()).with_annotations(true).run(records(&[text, text]));
        assert_eq!(out.documents.len(), 1);
        assert_eq!(out.report.redactions["email"], 2);
        let trail = &out.documents[0].meta["pipeline"];
        assert_eq!(trail["pii"], "modified");
        assert_eq!(trail["exact_dedup"], "kept");
        let report = PipelineReport::from_json(&out.report.to_json()).unwrap();
        assert_eq!(report, out.report);
        assert!(PipelineReport::from_json(&out.report.to_json().replace("\"version\": 1", "\"version\": 9")).is_err());
    }

    #[test]
    fn classifier_requires_model() {
        let mut config = PipelineConfig::default();
        config.stages.classifier = true;
        assert!(Pipeline::new(config, Tokenizer::byte_level(Normalization::Nfkc), None).is_err());
    }
}
