use unicode_normalization::UnicodeNormalization;

use super::document::{Document, Stage, StageOutcome};

/// Canonical text form used by every later stage.
///
/// Line endings become LF, control characters other than TAB/LF are removed,
/// NFKC is applied, each line is trimmed, runs of three or more blank lines
/// shrink to two, and leading/trailing blank lines are dropped.
pub fn normalize_text(text: &str) -> String {
    let cleaned: String = text
        .replace("\r\n", "\n")
        .chars()
        .map(|c| if c == '\r' { '\n' } else { c })
        .filter(|&c| !c.is_control() || c == '\t' || c == '\n')
        .collect();
    let nfkc: String = cleaned.nfkc().collect();

    let mut out = String::with_capacity(nfkc.len());
    let mut blank_run = 0usize;
    for line in nfkc.split('\n') {
        let line = line.trim();
        if line.is_empty() {
            blank_run += 1;
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
            for _ in 0..blank_run.min(2) {
                out.push('\n');
            }
        }
        blank_run = 0;
        out.push_str(line);
    }
    out
}

pub fn normalize_document(mut doc: Document) -> (Document, StageOutcome) {
    let normalized = normalize_text(&doc.text);
    let outcome = if normalized == doc.text {
        StageOutcome::kept(&doc.doc_id, Stage::Normalize)
    } else {
        StageOutcome::modified(&doc.doc_id, Stage::Normalize)
    };
    doc.text = normalized;
    (doc, outcome)
}
