use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::pretokenize::segments;
use super::vocab::{MergeTable, PieceKind, Vocabulary, BYTE_ID_OFFSET};
use super::TokenizerError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    None,
    #[default]
    Nfkc,
}

impl Normalization {
    pub fn apply(self, text: &str) -> String {
        match self {
            Normalization::None => text.to_string(),
            Normalization::Nfkc => text.nfkc().collect(),
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Normalization::None),
            "nfkc" => Ok(Normalization::Nfkc),
            other => Err(format!("unknown normalization {other:?} (expected none or nfkc)")),
        }
    }
}

/// Token ids plus the byte span of the input each one covers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Encoding {
    pub ids: Vec<u32>,
    pub offsets: Vec<(usize, usize)>,
}

impl Encoding {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// An immutable byte-fallback BPE tokenizer. Safe to share across threads.
#[derive(Clone, Debug)]
pub struct Tokenizer {
    vocab: Vocabulary,
    merges: MergeTable,
    normalization: Normalization,
    special_markers: Vec<(String, u32)>,
    /// (left id, right id) -> (rank, result id)
    merge_index: HashMap<(u32, u32), (u32, u32)>,
}

impl PartialEq for Tokenizer {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab && self.merges == other.merges && self.normalization == other.normalization
    }
}

impl Eq for Tokenizer {}

const FALLBACK: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Symbol {
    id: u32,
    start: usize,
    end: usize,
    prev: usize,
    next: usize,
    alive: bool,
}

impl Tokenizer {
    pub fn new(vocab: Vocabulary, merges: MergeTable, normalization: Normalization) -> Result<Self, TokenizerError> {
        let mut merge_index = HashMap::with_capacity(merges.len());
        for rule in merges.rules() {
            let resolve = |piece: &str| {
                vocab.id(piece).ok_or_else(|| {
                    TokenizerError::InvalidVocabulary(format!("merge rule {} references unknown piece {piece:?}", rule.rank))
                })
            };
            let (left, right, result) = (resolve(&rule.left)?, resolve(&rule.right)?, resolve(&rule.result)?);
            for id in [left, right, result] {
                if matches!(vocab.get(id).map(|e| e.kind), Some(PieceKind::Byte | PieceKind::Special)) {
                    return Err(TokenizerError::InvalidVocabulary(format!(
                        "merge rule {} involves a byte or special piece",
                        rule.rank
                    )));
                }
            }
            if merge_index.insert((left, right), (rule.rank, result)).is_some() {
                return Err(TokenizerError::InvalidVocabulary(format!(
                    "duplicate merge rule for {:?} + {:?}",
                    rule.left, rule.right
                )));
            }
        }
        let mut special_markers: Vec<(String, u32)> = vocab
            .entries()
            .iter()
            .filter(|e| e.kind == PieceKind::Special)
            .map(|e| (e.piece.clone(), e.id))
            .collect();
        // Longest marker wins when several match at one position.
        special_markers.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
        Ok(Tokenizer { vocab, merges, normalization, special_markers, merge_index })
    }

    /// Specials and byte tokens only: every character falls back to bytes.
    pub fn byte_level(normalization: Normalization) -> Self {
        Tokenizer::new(Vocabulary::with_byte_fallback(), MergeTable::default(), normalization)
            .expect("byte-level vocabulary is valid")
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn merges(&self) -> &MergeTable {
        &self.merges
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn special_markers(&self) -> impl Iterator<Item = &str> {
        self.special_markers.iter().map(|(p, _)| p.as_str())
    }

    /// Applies the configured normalization. `encode` itself is lossless over
    /// whatever it is given; callers that want the training distribution
    /// normalize first.
    pub fn normalize(&self, text: &str) -> String {
        self.normalization.apply(text)
    }

    pub fn encode(&self, text: &str) -> Encoding {
        let mut out = Encoding {
            ids: Vec::with_capacity(text.len() / 2),
            offsets: Vec::with_capacity(text.len() / 2),
        };
        let mut plain_start = 0;
        let mut pos = 0;
        while pos < text.len() {
            if let Some((marker, id)) = self.marker_at(&text[pos..]) {
                self.encode_plain(&text[plain_start..pos], plain_start, &mut out);
                out.ids.push(id);
                out.offsets.push((pos, pos + marker.len()));
                pos += marker.len();
                plain_start = pos;
            } else {
                pos += text[pos..].chars().next().map_or(1, char::len_utf8);
            }
        }
        self.encode_plain(&text[plain_start..], plain_start, &mut out);
        out
    }

    /// Normalizes and encodes in one step.
    pub fn encode_normalized(&self, text: &str) -> Encoding {
        self.encode(&self.normalize(text))
    }

    fn marker_at(&self, rest: &str) -> Option<(&str, u32)> {
        self.special_markers
            .iter()
            .find(|(m, _)| rest.starts_with(m.as_str()))
            .map(|(m, id)| (m.as_str(), *id))
    }

    fn encode_plain(&self, text: &str, base: usize, out: &mut Encoding) {
        let mut symbols = Vec::new();
        for (start, end) in segments(text) {
            self.encode_segment(&text[start..end], base + start, &mut symbols, out);
        }
    }

    fn encode_segment(&self, segment: &str, base: usize, symbols: &mut Vec<Symbol>, out: &mut Encoding) {
        symbols.clear();
        let mut buf = [0u8; 4];
        for (offset, ch) in segment.char_indices() {
            let id = self.vocab.id(ch.encode_utf8(&mut buf)).unwrap_or(FALLBACK);
            let idx = symbols.len();
            symbols.push(Symbol {
                id,
                start: offset,
                end: offset + ch.len_utf8(),
                prev: idx.wrapping_sub(1),
                next: idx + 1,
                alive: true,
            });
        }

        if !self.merge_index.is_empty() && symbols.len() > 1 {
            let mut heap = BinaryHeap::new();
            for left in 0..symbols.len() - 1 {
                self.push_candidate(symbols, left, &mut heap);
            }
            while let Some(Reverse((rank, left, right_id, result))) = heap.pop() {
                let sym = symbols[left];
                if !sym.alive || sym.next >= symbols.len() {
                    continue;
                }
                let right = sym.next;
                // Stale entry: one side has been merged since it was queued.
                let current = self.merge_index.get(&(sym.id, symbols[right].id));
                if symbols[right].id != right_id || current != Some(&(rank, result)) {
                    continue;
                }
                let merged_end = symbols[right].end;
                let after = symbols[right].next;
                symbols[right].alive = false;
                let sym = &mut symbols[left];
                sym.id = result;
                sym.end = merged_end;
                sym.next = after;
                if after < symbols.len() {
                    symbols[after].prev = left;
                }
                let prev = symbols[left].prev;
                if prev < symbols.len() {
                    self.push_candidate(symbols, prev, &mut heap);
                }
                self.push_candidate(symbols, left, &mut heap);
            }
        }

        let bytes = segment.as_bytes();
        let mut idx = 0;
        while idx < symbols.len() {
            let sym = symbols[idx];
            if sym.id == FALLBACK {
                for (b, &byte) in bytes.iter().enumerate().take(sym.end).skip(sym.start) {
                    out.ids.push(BYTE_ID_OFFSET + u32::from(byte));
                    out.offsets.push((base + b, base + b + 1));
                }
            } else {
                out.ids.push(sym.id);
                out.offsets.push((base + sym.start, base + sym.end));
            }
            idx = sym.next;
        }
    }

    fn push_candidate(&self, symbols: &[Symbol], left: usize, heap: &mut BinaryHeap<Reverse<(u32, usize, u32, u32)>>) {
        let right = symbols[left].next;
        if right >= symbols.len() {
            return;
        }
        let (l, r) = (symbols[left].id, symbols[right].id);
        if l == FALLBACK || r == FALLBACK {
            return;
        }
        if let Some(&(rank, result)) = self.merge_index.get(&(l, r)) {
            heap.push(Reverse((rank, left, r, result)));
        }
    }

    pub fn decode(&self, ids: &[u32]) -> Result<String, TokenizerError> {
        let mut bytes = Vec::with_capacity(ids.len() * 2);
        for &id in ids {
            let entry = self.vocab.get(id).ok_or(TokenizerError::UnknownId(id))?;
            match entry.kind {
                PieceKind::Byte => bytes.push((id - BYTE_ID_OFFSET) as u8),
                _ => bytes.extend_from_slice(entry.piece.as_bytes()),
            }
        }
        String::from_utf8(bytes).map_err(|e| TokenizerError::InvalidUtf8 { offset: e.utf8_error().valid_up_to() })
    }
}
