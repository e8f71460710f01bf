//! Corpus curation: normalization, PII redaction, exact and near-duplicate
//! removal, heuristic and classifier filtering, with per-stage accounting.

mod config;
mod dedup;
mod document;
mod heuristics;
mod minhash;
mod normalize;
mod pii;
mod pipeline;
mod quality;
pub mod stats;

pub use config::{HeuristicConfig, NearDupConfig, PipelineConfig, StageToggles, CONFIG_VERSION};
pub use dedup::{dedup_exact, dedup_near};
pub use document::{parse_record, read_jsonl, write_jsonl, Document, Record, RecordError, Stage, StageOutcome, Verdict};
pub use heuristics::heuristic_filters;
pub use minhash::{MinHashSignature, MinHasher, TooShort};
pub use normalize::{normalize_document, normalize_text};
pub use pii::{redact_pii, PiiPattern, PiiRedactor, Redaction, EMAIL_PLACEHOLDER, PHONE_PLACEHOLDER};
pub use pipeline::{Pipeline, PipelineOutput, PipelineReport, StageCounts, REPORT_VERSION};
pub use quality::{classify_quality, extract_features, fit_quality_model, FitOptions, QualityModel, FEATURE_NAMES, MODEL_VERSION};

use crate::tokenizer::Tokenizer;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    /// One message per offending configuration field.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("invalid quality model: {0}")]
    Model(String),
    #[error("invalid report: {0}")]
    Report(String),
    #[error("unsupported artifact version {0}")]
    UnsupportedVersion(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Runs every enabled stage over `docs` in the fixed stage order.
pub fn run_pipeline(
    docs: impl IntoIterator<Item = Document>,
    config: &PipelineConfig,
    tokenizer: &Tokenizer,
) -> Result<(Vec<Document>, PipelineReport), CorpusError> {
    let model = match &config.quality_model {
        Some(path) => Some(QualityModel::load(path)?),
        None => None,
    };
    let pipeline = Pipeline::new(config.clone(), tokenizer.clone(), model)?;
    let out = pipeline.run(docs.into_iter().map(Ok));
    Ok((out.documents, out.report))
}
