//! Data-side tooling for Japanese-oriented language models.
//!
//! * [`tokenizer`]: byte-fallback BPE with frozen-base vocabulary extension and
//!   character-per-token measurement.
//! * [`corpus`]: streaming curation pipeline (normalization, PII redaction,
//!   exact and MinHash near-duplicate removal, heuristic and classifier filters).
//! * [`eval`]: likelihood multiple choice, exact match, ROUGE-2, n-shot prompts
//!   and suite aggregation.

pub mod corpus;
pub mod eval;
pub mod tokenizer;

pub use corpus::{Document, PipelineConfig, PipelineReport, QualityModel};
pub use eval::{MetricResult, ModelScorer, SuiteReport, TaskSpec};
pub use tokenizer::{CptReport, Encoding, Normalization, Tokenizer};

/// Version string shared by every artifact writer and front end.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
