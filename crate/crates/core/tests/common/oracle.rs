//! Brute-force reference implementations used only by tests. Deliberately
//! naive: no incremental bookkeeping, no heaps, full rescans every step.
#![allow(dead_code)]

/// Splits before each whitespace char that follows a non-whitespace char.
pub fn split_words(text: &str) -> Vec<Vec<String>> {
    let mut words: Vec<Vec<String>> = Vec::new();
    let mut prev_ws: Option<bool> = None;
    for ch in text.chars() {
        let ws = ch.is_whitespace();
        if words.is_empty() || (ws && prev_ws == Some(false)) {
            words.push(Vec::new());
        }
        words.last_mut().unwrap().push(ch.to_string());
        prev_ws = Some(ws);
    }
    words
}

fn reserved(piece: &str) -> bool {
    let byte_like = piece.len() == 6
        && piece.is_ascii()
        && piece.starts_with("<0")
        && (piece[1..3] == *"0x" || piece[1..3] == *"0X")
        && piece.ends_with('>')
        && piece[3..5].chars().all(|c| c.is_ascii_hexdigit());
    byte_like || ["<pad>", "<s>", "</s>"].contains(&piece)
}

/// Recounts every adjacent pair each iteration and merges the most frequent
/// (ties: smallest (left, right)). Returns the learned (left, right) list.
pub fn brute_force_merges(corpus: &[String], num_merges: usize, max_chars: usize) -> Vec<(String, String)> {
    let mut words: Vec<Vec<String>> = corpus.iter().flat_map(|t| split_words(t)).collect();
    let mut learned = Vec::new();
    while learned.len() < num_merges {
        let mut counts: Vec<((String, String), u64)> = Vec::new();
        for word in &words {
            for i in 0..word.len().saturating_sub(1) {
                let key = (word[i].clone(), word[i + 1].clone());
                let merged = format!("{}{}", key.0, key.1);
                if merged.chars().count() > max_chars || reserved(&merged) {
                    continue;
                }
                match counts.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, n)) => *n += 1,
                    None => counts.push((key, 1)),
                }
            }
        }
        let Some(best) = counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
            .map(|(k, _)| k)
        else {
            break;
        };
        for word in &mut words {
            let mut out = Vec::new();
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == best.0 && word[i + 1] == best.1 {
                    out.push(format!("{}{}", best.0, best.1));
                    i += 2;
                } else {
                    out.push(word[i].clone());
                    i += 1;
                }
            }
            *word = out;
        }
        learned.push(best);
    }
    learned
}

/// Applies rules one at a time in rank order, each everywhere left to right,
/// then expands uncovered characters into their UTF-8 bytes. Returns pieces
/// (byte tokens as `<0xNN>`).
pub fn brute_force_encode(text: &str, pieces: &[String], rules: &[(String, String)]) -> Vec<String> {
    let mut out = Vec::new();
    for word in split_words(text) {
        // `false` marks a byte-fallback character.
        let mut syms: Vec<(String, bool)> = word.iter().map(|c| (c.clone(), pieces.contains(c))).collect();
        for (left, right) in rules {
            let mut merged = Vec::new();
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i].1 && syms[i + 1].1 && syms[i].0 == *left && syms[i + 1].0 == *right {
                    merged.push((format!("{left}{right}"), true));
                    i += 2;
                } else {
                    merged.push(syms[i].clone());
                    i += 1;
                }
            }
            syms = merged;
        }
        for (piece, covered) in syms {
            if covered {
                out.push(piece);
            } else {
                out.extend(piece.bytes().map(|b| format!("<0x{b:02X}>")));
            }
        }
    }
    out
}

/// Exact Jaccard similarity of character-shingle sets.
pub fn exact_jaccard(a: &str, b: &str, k: usize) -> f64 {
    use std::collections::BTreeSet;
    let shingles = |s: &str| -> BTreeSet<String> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() < k {
            return BTreeSet::new();
        }
        (0..=chars.len() - k).map(|i| chars[i..i + k].iter().collect()).collect()
    };
    let (sa, sb) = (shingles(a), shingles(b));
    let union = sa.union(&sb).count();
    if union == 0 {
        return 0.0;
    }
    sa.intersection(&sb).count() as f64 / union as f64
}
