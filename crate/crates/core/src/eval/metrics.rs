use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory as Gc};
use unicode_normalization::UnicodeNormalization;

fn is_punct_or_symbol(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::ConnectorPunctuation
            | Gc::DashPunctuation
            | Gc::OpenPunctuation
            | Gc::ClosePunctuation
            | Gc::InitialPunctuation
            | Gc::FinalPunctuation
            | Gc::OtherPunctuation
            | Gc::MathSymbol
            | Gc::CurrencySymbol
            | Gc::ModifierSymbol
            | Gc::OtherSymbol
    )
}

fn is_emoticon(c: char) -> bool {
    matches!(c, '\u{1F300}'..='\u{1FAFF}' | '\u{2600}'..='\u{27BF}')
}

fn is_latin(c: char) -> bool {
    matches!(c, 'A'..='Z' | '\u{C0}'..='\u{24F}' | '\u{1E00}'..='\u{1EFF}')
}

/// NFKC, then punctuation, symbols and emoticons removed, Latin letters
/// lowercased, whitespace collapsed and trimmed.
pub fn normalize_answer(text: &str) -> String {
    let mut lowered = String::with_capacity(text.len());
    for c in text.nfkc().filter(|&c| !is_punct_or_symbol(c) && !is_emoticon(c)) {
        if is_latin(c) {
            lowered.extend(c.to_lowercase());
        } else {
            lowered.push(c);
        }
    }
    // Recompose: dropping a symbol or lowercasing a base letter can create a
    // sequence with a precomposed form.
    let recomposed: String = lowered.nfkc().collect();
    recomposed.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn exact_match<S: AsRef<str>>(prediction: &str, references: &[S]) -> bool {
    let pred = normalize_answer(prediction);
    references.iter().any(|r| normalize_answer(r.as_ref()) == pred)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segmenter {
    /// Unicode scalar values, whitespace dropped.
    #[default]
    Char,
    Whitespace,
}

impl Segmenter {
    pub fn units(self, text: &str) -> Vec<&str> {
        match self {
            Segmenter::Char => text
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .map(|(i, c)| &text[i..i + c.len_utf8()])
                .collect(),
            Segmenter::Whitespace => text.split_whitespace().collect(),
        }
    }
}

/// ROUGE-2 F1 with clipped bigram counts between two unit sequences.
pub fn rouge2_units<T: Eq + Hash>(hypothesis: &[T], reference: &[T]) -> f64 {
    if hypothesis.len() < 2 || reference.len() < 2 {
        return 0.0;
    }
    let mut ref_counts: HashMap<(&T, &T), usize> = HashMap::new();
    for w in reference.windows(2) {
        *ref_counts.entry((&w[0], &w[1])).or_insert(0) += 1;
    }
    let mut overlap = 0usize;
    for w in hypothesis.windows(2) {
        if let Some(n) = ref_counts.get_mut(&(&w[0], &w[1])) {
            if *n > 0 {
                *n -= 1;
                overlap += 1;
            }
        }
    }
    if overlap == 0 {
        return 0.0;
    }
    let p = overlap as f64 / (hypothesis.len() - 1) as f64;
    let r = overlap as f64 / (reference.len() - 1) as f64;
    2.0 * p * r / (p + r)
}

pub fn rouge2(hypothesis: &str, reference: &str, segmenter: Segmenter) -> f64 {
    rouge2_units(&segmenter.units(hypothesis), &segmenter.units(reference))
}
