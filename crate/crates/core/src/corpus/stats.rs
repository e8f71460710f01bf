//! Per-document text statistics shared by the heuristic filter and the
//! quality classifier.

use std::collections::HashSet;

const COMMON_PUNCTUATION: &str = ".,!?;:'\"()-[]/%、。「」『』・〜";
const SENTENCE_ENDS: &[char] = &['。', '.', '!', '?', '\n'];

pub fn is_kana(c: char) -> bool {
    matches!(c, '\u{3041}'..='\u{309F}' | '\u{30A0}'..='\u{30FF}' | '\u{31F0}'..='\u{31FF}' | '\u{FF66}'..='\u{FF9F}')
}

pub fn is_kanji(c: char) -> bool {
    matches!(c,
        '\u{3400}'..='\u{4DBF}'
        | '\u{4E00}'..='\u{9FFF}'
        | '\u{F900}'..='\u{FAFF}'
        | '\u{20000}'..='\u{2FA1F}'
        | '\u{3005}' | '\u{3007}')
}

/// Letters, digits, kana, kanji, whitespace and common punctuation are
/// ordinary; anything else counts toward the symbol ratio.
pub fn is_symbol(c: char) -> bool {
    !(c.is_alphabetic() || c.is_numeric() || c.is_whitespace() || is_kana(c) || is_kanji(c) || COMMON_PUNCTUATION.contains(c))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TextStats {
    pub chars: usize,
    pub symbol_ratio: f64,
    /// 1 - distinct / total over character 4-grams; 0 below four characters.
    pub repetition_ratio: f64,
    pub digit_ratio: f64,
    pub mean_sentence_chars: f64,
    pub kana_chars: usize,
    pub kanji_chars: usize,
}

impl TextStats {
    pub fn compute(text: &str) -> Self {
        let starts: Vec<usize> = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len())).collect();
        let chars = starts.len() - 1;
        if chars == 0 {
            return TextStats::default();
        }
        let (mut symbols, mut digits, mut kana, mut kanji) = (0usize, 0usize, 0usize, 0usize);
        for c in text.chars() {
            symbols += usize::from(is_symbol(c));
            digits += usize::from(c.is_numeric());
            kana += usize::from(is_kana(c));
            kanji += usize::from(is_kanji(c));
        }
        let repetition_ratio = if chars < 4 {
            0.0
        } else {
            let total = chars - 3;
            let distinct: HashSet<&str> = (0..total).map(|i| &text[starts[i]..starts[i + 4]]).collect();
            1.0 - distinct.len() as f64 / total as f64
        };
        let sentences: Vec<usize> = text
            .split(SENTENCE_ENDS)
            .map(|s| s.trim().chars().count())
            .filter(|&n| n > 0)
            .collect();
        let mean_sentence_chars =
            if sentences.is_empty() { 0.0 } else { sentences.iter().sum::<usize>() as f64 / sentences.len() as f64 };
        TextStats {
            chars,
            symbol_ratio: symbols as f64 / chars as f64,
            repetition_ratio,
            digit_ratio: digits as f64 / chars as f64,
            mean_sentence_chars,
            kana_chars: kana,
            kanji_chars: kanji,
        }
    }

    /// Kana share of the Japanese script characters; 0 when there are none.
    pub fn kana_share(&self) -> f64 {
        let cjk = self.kana_chars + self.kanji_chars;
        if cjk == 0 { 0.0 } else { self.kana_chars as f64 / cjk as f64 }
    }
}
