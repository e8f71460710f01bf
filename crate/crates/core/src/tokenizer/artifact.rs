//! Versioned JSON vocabulary artifact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{Normalization, Tokenizer};
use super::vocab::{MergeRule, MergeTable, PieceKind, TokenEntry, Vocabulary};
use super::TokenizerError;

pub const ARTIFACT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Artifact {
    version: u64,
    normalization: Normalization,
    pieces: Vec<PieceRecord>,
    merges: Vec<MergeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceRecord {
    piece: String,
    id: u32,
    rank: u32,
    kind: PieceKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MergeRecord {
    left: String,
    right: String,
    rank: u32,
}

impl Tokenizer {
    pub fn to_json(&self) -> String {
        let artifact = Artifact {
            version: ARTIFACT_VERSION,
            normalization: self.normalization(),
            pieces: self
                .vocab()
                .entries()
                .iter()
                .map(|e| PieceRecord { piece: e.piece.clone(), id: e.id, rank: e.rank, kind: e.kind })
                .collect(),
            merges: self
                .merges()
                .rules()
                .iter()
                .map(|r| MergeRecord { left: r.left.clone(), right: r.right.clone(), rank: r.rank })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&artifact).expect("artifact serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, TokenizerError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("version").and_then(serde_json::Value::as_u64) {
            Some(ARTIFACT_VERSION) => {}
            Some(other) => return Err(TokenizerError::UnsupportedVersion(other)),
            None => return Err(TokenizerError::InvalidVocabulary("missing integer field `version`".into())),
        }
        let artifact: Artifact = serde_json::from_value(value)?;
        let entries = artifact
            .pieces
            .into_iter()
            .map(|p| TokenEntry { piece: p.piece, id: p.id, rank: p.rank, kind: p.kind })
            .collect();
        let vocab = Vocabulary::from_entries(entries)?;
        let rules = artifact.merges.into_iter().map(|m| MergeRule::new(m.left, m.right, m.rank)).collect();
        Tokenizer::new(vocab, MergeTable::new(rules)?, artifact.normalization)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TokenizerError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TokenizerError> {
        Tokenizer::from_json(&fs::read_to_string(path)?)
    }
}
