//! Email and phone-number redaction.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::document::{Document, Stage, StageOutcome};

pub const EMAIL_PLACEHOLDER: &str = "[EMAIL]";
pub const PHONE_PLACEHOLDER: &str = "[PHONE]";

static EMAIL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9](?:[A-Za-z0-9\-]*[A-Za-z0-9])?(?:\.[A-Za-z0-9](?:[A-Za-z0-9\-]*[A-Za-z0-9])?)*\.[A-Za-z]{2,}",
    )
    .unwrap()
});

// Digit runs with single spaces or hyphens between groups; validated below.
static PHONE_CANDIDATE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\+?[0-9]+(?:[ \-]?[0-9]+)+").unwrap());

/// A user-supplied redaction category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiiPattern {
    pub category: String,
    pub pattern: String,
    pub placeholder: String,
}

#[derive(Clone, Debug)]
struct CustomRule {
    category: String,
    placeholder: String,
    regex: Regex,
}

#[derive(Clone, Debug, Default)]
pub struct PiiRedactor {
    custom: Vec<CustomRule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redaction {
    pub text: String,
    /// Replacements per category; categories with no hits are absent.
    pub counts: BTreeMap<String, u64>,
}

impl Redaction {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

struct Span {
    start: usize,
    end: usize,
    category: usize,
}

fn is_phone(candidate: &str) -> bool {
    let digits: Vec<u8> = candidate.bytes().filter(u8::is_ascii_digit).collect();
    let groups = candidate.split([' ', '-']).count();
    if candidate.starts_with('+') {
        return (8..=15).contains(&digits.len()) && digits[0] != b'0';
    }
    if digits[0] != b'0' || digits.get(1) == Some(&b'0') {
        return false;
    }
    let plausible_groups = groups == 1 || groups == 3;
    match digits.len() {
        // 0X0-XXXX-XXXX mobile / IP phone forms
        11 => plausible_groups && digits[2] == b'0' && matches!(digits[1], b'5'..=b'9'),
        // 0X-XXXX-XXXX and other area-code splits
        10 => plausible_groups,
        _ => false,
    }
}

/// Longest prefix of `candidate` ending at a group boundary that is a valid
/// phone number.
fn phone_prefix(candidate: &str) -> Option<usize> {
    let mut ends: Vec<usize> = candidate.match_indices([' ', '-']).map(|(i, _)| i).collect();
    ends.push(candidate.len());
    ends.into_iter().rev().find(|&end| is_phone(&candidate[..end]))
}

impl PiiRedactor {
    pub fn new(extra: &[PiiPattern]) -> Result<Self, regex::Error> {
        let custom = extra
            .iter()
            .map(|p| {
                Ok(CustomRule { category: p.category.clone(), placeholder: p.placeholder.clone(), regex: Regex::new(&p.pattern)? })
            })
            .collect::<Result<_, regex::Error>>()?;
        Ok(PiiRedactor { custom })
    }

    fn spans(&self, text: &str) -> Vec<Span> {
        let mut spans = Vec::new();
        for m in EMAIL.find_iter(text) {
            spans.push(Span { start: m.start(), end: m.end(), category: 0 });
        }
        let bytes = text.as_bytes();
        let mut from = 0;
        while let Some(m) = PHONE_CANDIDATE.find_at(text, from) {
            from = m.end();
            let before = text[..m.start()].chars().next_back();
            if before.is_some_and(|c| c.is_ascii_alphanumeric() || c == '+') {
                continue;
            }
            if let Some(len) = phone_prefix(m.as_str()) {
                // A hyphen right after the prefix means the number continues.
                let end = m.start() + len;
                if bytes.get(end) != Some(&b'-') {
                    spans.push(Span { start: m.start(), end, category: 1 });
                }
            }
        }
        for (idx, rule) in self.custom.iter().enumerate() {
            for m in rule.regex.find_iter(text) {
                if !m.is_empty() {
                    spans.push(Span { start: m.start(), end: m.end(), category: idx + 2 });
                }
            }
        }
        // Earliest start wins; built-ins win ties.
        spans.sort_by_key(|s| (s.start, s.category));
        let mut kept: Vec<Span> = Vec::with_capacity(spans.len());
        for span in spans {
            if kept.last().is_none_or(|last| span.start >= last.end) {
                kept.push(span);
            }
        }
        kept
    }

    fn category(&self, idx: usize) -> (&str, &str) {
        match idx {
            0 => ("email", EMAIL_PLACEHOLDER),
            1 => ("phone", PHONE_PLACEHOLDER),
            n => {
                let rule = &self.custom[n - 2];
                (rule.category.as_str(), rule.placeholder.as_str())
            }
        }
    }

    pub fn redact(&self, text: &str) -> Redaction {
        let mut out = String::with_capacity(text.len());
        let mut counts = BTreeMap::new();
        let mut cursor = 0;
        for span in self.spans(text) {
            let (category, placeholder) = self.category(span.category);
            out.push_str(&text[cursor..span.start]);
            out.push_str(placeholder);
            *counts.entry(category.to_string()).or_insert(0) += 1;
            cursor = span.end;
        }
        out.push_str(&text[cursor..]);
        Redaction { text: out, counts }
    }

    pub fn redact_document(&self, mut doc: Document) -> (Document, StageOutcome, BTreeMap<String, u64>) {
        let redaction = self.redact(&doc.text);
        let mut outcome = if redaction.total() == 0 {
            StageOutcome::kept(&doc.doc_id, Stage::Pii)
        } else {
            StageOutcome::modified(&doc.doc_id, Stage::Pii)
        };
        for (category, n) in &redaction.counts {
            outcome = outcome.with_detail(category, *n);
        }
        doc.text = redaction.text;
        (doc, outcome, redaction.counts)
    }
}

/// Redacts with the built-in categories only.
pub fn redact_pii(doc: Document) -> (Document, StageOutcome) {
    let (doc, outcome, _) = PiiRedactor::default().redact_document(doc);
    (doc, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn redact(text: &str) -> String {
        PiiRedactor::default().redact(text).text
    }

    #[test]
    fn email() {
        let r = PiiRedactor::default().redact("contact: foo@bar.com");
        assert_eq!(r.text, "contact: [EMAIL]");
        assert_eq!(r.counts["email"], 1);
    }

    #[test]
    fn japanese_phone_forms() {
        assert_eq!(redact("tel: 090-1234-5678"), "tel: [PHONE]");
        assert_eq!(redact("tel: 09012345678"), "tel: [PHONE]");
        assert_eq!(redact("tel: 090 1234 5678"), "tel: [PHONE]");
        assert_eq!(redact("代表 03-1234-5678 まで"), "代表 [PHONE] まで");
        assert_eq!(redact("0312345678"), "[PHONE]");
        assert_eq!(redact("TEL.03-1234-5678"), "TEL.[PHONE]");
        assert_eq!(redact("電話090-1234-5678です"), "電話[PHONE]です");
    }

    #[test]
    fn international_form() {
        assert_eq!(redact("call +81 90-1234-5678 now"), "call [PHONE] now");
        assert_eq!(redact("+1 415 555 0100"), "[PHONE]");
    }

    #[test]
    fn trailing_numbers_are_not_swallowed() {
        assert_eq!(redact("090-1234-5678 12"), "[PHONE] 12");
        assert_eq!(redact("090-1234-5678-9"), "090-1234-5678-9");
    }

    #[test]
    fn non_phones_untouched() {
        for text in ["2023-10-15", "100-0001", "ISBN 978-4-12-345678-9", "v1.2.3", "12345678901", "03-1234", "0000-0000-00"] {
            assert_eq!(redact(text), text, "{text}");
        }
    }

    #[test]
    fn idempotent() {
        let once = redact("mail a.b@example.co.jp or 080-1111-2222");
        assert_eq!(once, "mail [EMAIL] or [PHONE]");
        assert_eq!(PiiRedactor::default().redact(&once).total(), 0);
    }

    #[test]
    fn custom_category() {
        let redactor = PiiRedactor::new(&[PiiPattern {
            category: "postal".into(),
            pattern: r"〒\d{3}-\d{4}".into(),
            placeholder: "[POSTAL]".into(),
        }])
        .unwrap();
        let r = redactor.redact("〒100-0001 foo@bar.com");
        assert_eq!(r.text, "[POSTAL] [EMAIL]");
        assert_eq!(r.counts.len(), 2);
    }
}
