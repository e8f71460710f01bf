use super::config::HeuristicConfig;
use super::document::{Document, Stage, StageOutcome};
use super::stats::TextStats;

/// Drops documents that violate any heuristic; the reason names the first
/// violated rule in the order length, symbol ratio, repetition.
pub fn heuristic_filters(doc: &Document, config: &HeuristicConfig) -> StageOutcome {
    let stats = TextStats::compute(&doc.text);
    let violation = if stats.chars < config.min_chars {
        Some("min length")
    } else if stats.chars > config.max_chars {
        Some("max length")
    } else if stats.symbol_ratio > config.max_symbol_ratio {
        Some("symbol ratio")
    } else if stats.repetition_ratio > config.max_repetition_ratio {
        Some("repetition")
    } else {
        None
    };
    let outcome = match violation {
        Some(reason) => StageOutcome::dropped(&doc.doc_id, Stage::Heuristics, reason),
        None => StageOutcome::kept(&doc.doc_id, Stage::Heuristics),
    };
    outcome
        .with_detail("chars", stats.chars as u64)
        .with_detail("symbol_ratio", stats.symbol_ratio)
        .with_detail("repetition_ratio", stats.repetition_ratio)
}
