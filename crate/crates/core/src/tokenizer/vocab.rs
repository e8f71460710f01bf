use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::TokenizerError;

/// Reserved special pieces, occupying ids 0..=2.
pub const SPECIAL_PIECES: [&str; 3] = ["<pad>", "<s>", "</s>"];
/// Id of the byte token for `0x00`; byte `b` lives at `BYTE_ID_OFFSET + b`.
pub const BYTE_ID_OFFSET: u32 = SPECIAL_PIECES.len() as u32;
/// First id available to non-byte, non-special pieces.
pub const FIRST_PIECE_ID: u32 = BYTE_ID_OFFSET + 256;
/// Learned pieces never exceed this many Unicode scalar values.
pub const MAX_PIECE_CHARS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceKind {
    Special,
    Byte,
    Base,
    Extension,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenEntry {
    pub piece: String,
    pub id: u32,
    /// Rank of the merge rule that first produced this piece; 0 for atomic
    /// pieces (specials, bytes, single characters).
    pub rank: u32,
    pub kind: PieceKind,
}

/// Canonical surface of a byte token, e.g. `<0xE6>`.
pub fn byte_surface(byte: u8) -> String {
    format!("<0x{byte:02X}>")
}

/// Parses a canonical (uppercase hex) byte surface.
pub fn parse_byte_surface(piece: &str) -> Option<u8> {
    let hex = piece.strip_prefix("<0x")?.strip_suffix('>')?;
    if hex.len() != 2 || !hex.bytes().all(|b| b.is_ascii_digit() || (b'A'..=b'F').contains(&b)) {
        return None;
    }
    u8::from_str_radix(hex, 16).ok()
}

/// True for anything that looks like a byte surface regardless of hex case.
/// Such strings are never admitted as learned pieces.
pub(crate) fn looks_like_byte_surface(piece: &str) -> bool {
    piece.len() == 6
        && piece.is_ascii()
        && piece.starts_with("<0")
        && piece[1..3].eq_ignore_ascii_case("0x")
        && piece.ends_with('>')
        && piece[3..5].bytes().all(|b| b.is_ascii_hexdigit())
}

/// Dense, id-ordered piece inventory. Non-extension entries always precede
/// extension entries, so base ids are never remapped by an extension.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    entries: Vec<TokenEntry>,
    index: HashMap<String, u32>,
    base_size: usize,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    /// Special markers followed by the 256 byte tokens.
    pub fn with_byte_fallback() -> Self {
        let mut vocab = Vocabulary {
            entries: Vec::with_capacity(FIRST_PIECE_ID as usize),
            index: HashMap::new(),
            base_size: 0,
        };
        for piece in SPECIAL_PIECES {
            vocab.push_unchecked(piece.to_string(), 0, PieceKind::Special);
        }
        for byte in 0..=255u8 {
            vocab.push_unchecked(byte_surface(byte), 0, PieceKind::Byte);
        }
        vocab
    }

    /// Builds a vocabulary from explicit entries, checking every structural
    /// invariant.
    pub fn from_entries(mut entries: Vec<TokenEntry>) -> Result<Self, TokenizerError> {
        entries.sort_by_key(|e| e.id);
        let mut index = HashMap::with_capacity(entries.len());
        let mut seen_extension = false;
        let mut byte_count = 0usize;
        for (position, entry) in entries.iter().enumerate() {
            let invalid = |msg: String| Err(TokenizerError::InvalidVocabulary(msg));
            if entry.id as usize != position {
                return invalid(format!("ids are not dense: expected {position}, found {}", entry.id));
            }
            if entry.piece.is_empty() {
                return invalid(format!("id {} has an empty piece", entry.id));
            }
            if index.insert(entry.piece.clone(), entry.id).is_some() {
                return invalid(format!("duplicate piece {:?}", entry.piece));
            }
            let byte = parse_byte_surface(&entry.piece);
            match entry.kind {
                PieceKind::Byte => {
                    let Some(byte) = byte else {
                        return invalid(format!("byte entry {} has surface {:?}", entry.id, entry.piece));
                    };
                    if entry.id != BYTE_ID_OFFSET + u32::from(byte) {
                        return invalid(format!("byte {:?} must have id {}", entry.piece, BYTE_ID_OFFSET + u32::from(byte)));
                    }
                    byte_count += 1;
                }
                _ if looks_like_byte_surface(&entry.piece) => {
                    return invalid(format!("non-byte entry {} uses byte surface {:?}", entry.id, entry.piece));
                }
                PieceKind::Special if entry.id >= BYTE_ID_OFFSET => {
                    return invalid(format!("special piece {:?} outside the reserved ids", entry.piece));
                }
                PieceKind::Extension => seen_extension = true,
                PieceKind::Special | PieceKind::Base if seen_extension => {
                    return invalid(format!("base entry {} follows an extension entry", entry.id));
                }
                _ => {}
            }
            if entry.id < FIRST_PIECE_ID && entry.kind != PieceKind::Special && entry.kind != PieceKind::Byte {
                return invalid(format!("id {} is reserved for specials and bytes", entry.id));
            }
        }
        if byte_count != 256 {
            return Err(TokenizerError::InvalidVocabulary(format!(
                "expected 256 byte entries, found {byte_count}"
            )));
        }
        let base_size = entries.iter().filter(|e| e.kind != PieceKind::Extension).count();
        Ok(Vocabulary { entries, index, base_size })
    }

    fn push_unchecked(&mut self, piece: String, rank: u32, kind: PieceKind) -> u32 {
        let id = self.entries.len() as u32;
        self.index.insert(piece.clone(), id);
        self.entries.push(TokenEntry { piece, id, rank, kind });
        if kind != PieceKind::Extension {
            self.base_size += 1;
        }
        id
    }

    /// Appends a new piece and returns its id.
    pub fn push(&mut self, piece: String, rank: u32, kind: PieceKind) -> Result<u32, TokenizerError> {
        if piece.is_empty() {
            return Err(TokenizerError::InvalidVocabulary("empty piece".into()));
        }
        if self.index.contains_key(&piece) {
            return Err(TokenizerError::InvalidVocabulary(format!("duplicate piece {piece:?}")));
        }
        if looks_like_byte_surface(&piece) || matches!(kind, PieceKind::Byte | PieceKind::Special) {
            return Err(TokenizerError::InvalidVocabulary(format!(
                "cannot append {piece:?} as {kind:?}"
            )));
        }
        if kind == PieceKind::Base && self.base_size != self.entries.len() {
            return Err(TokenizerError::InvalidVocabulary("base piece after extension".into()));
        }
        Ok(self.push_unchecked(piece, rank, kind))
    }

    pub fn id(&self, piece: &str) -> Option<u32> {
        self.index.get(piece).copied()
    }

    pub fn contains(&self, piece: &str) -> bool {
        self.index.contains_key(piece)
    }

    pub fn get(&self, id: u32) -> Option<&TokenEntry> {
        self.entries.get(id as usize)
    }

    pub fn entries(&self) -> &[TokenEntry] {
        &self.entries
    }

    /// Count of entries whose kind is not `extension`.
    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn total_size(&self) -> usize {
        self.entries.len()
    }

    pub fn extension_count(&self) -> usize {
        self.entries.len() - self.base_size
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeRule {
    pub left: String,
    pub right: String,
    pub result: String,
    pub rank: u32,
}

impl MergeRule {
    pub fn new(left: impl Into<String>, right: impl Into<String>, rank: u32) -> Self {
        let left = left.into();
        let right = right.into();
        let result = format!("{left}{right}");
        MergeRule { left, right, result, rank }
    }
}

/// Ordered merge rules; ranks strictly increase along the list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeTable {
    rules: Vec<MergeRule>,
}

impl MergeTable {
    pub fn new(rules: Vec<MergeRule>) -> Result<Self, TokenizerError> {
        for pair in rules.windows(2) {
            if pair[1].rank <= pair[0].rank {
                return Err(TokenizerError::InvalidVocabulary(format!(
                    "merge ranks must strictly increase ({} then {})",
                    pair[0].rank, pair[1].rank
                )));
            }
        }
        for rule in &rules {
            if rule.result.len() != rule.left.len() + rule.right.len()
                || !rule.result.starts_with(&rule.left)
                || !rule.result.ends_with(&rule.right)
            {
                return Err(TokenizerError::InvalidVocabulary(format!(
                    "merge result {:?} is not {:?} + {:?}",
                    rule.result, rule.left, rule.right
                )));
            }
        }
        Ok(MergeTable { rules })
    }

    pub fn rules(&self) -> &[MergeRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rank that the next appended rule should take.
    pub fn next_rank(&self) -> u32 {
        self.rules.last().map_or(0, |r| r.rank + 1)
    }

    pub(crate) fn push(&mut self, rule: MergeRule) {
        debug_assert!(self.rules.last().is_none_or(|r| r.rank < rule.rank));
        self.rules.push(rule);
    }
}
