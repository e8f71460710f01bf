//! Byte-fallback subword tokenizer.
//!
//! Ids 0..=2 are special markers, 3..=258 the 256 byte tokens, and every
//! higher id a learned piece. Characters without a covering piece are
//! emitted as their UTF-8 bytes, so encoding is total and lossless.

mod artifact;
mod cpt;
mod extend;
mod model;
pub mod pretokenize;
mod train;
mod vocab;

use thiserror::Error;

pub use artifact::ARTIFACT_VERSION;
pub use cpt::{char_per_token_rate, CptReport};
pub use extend::extend_vocabulary;
pub use model::{Encoding, Normalization, Tokenizer};
pub use train::{train_merges, train_tokenizer, LearnedMerge, MergeTrainer, TrainerConfig};
pub use vocab::{
    byte_surface, parse_byte_surface, MergeRule, MergeTable, PieceKind, TokenEntry, Vocabulary, BYTE_ID_OFFSET,
    FIRST_PIECE_ID, MAX_PIECE_CHARS, SPECIAL_PIECES,
};

#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("unknown token id {0}")]
    UnknownId(u32),
    #[error("decoded bytes are not valid UTF-8 (valid up to byte {offset})")]
    InvalidUtf8 { offset: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("unsupported artifact version {0}")]
    UnsupportedVersion(u64),
    #[error("malformed artifact: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
