use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::Tokenizer;
use super::TokenizerError;

/// Character-per-token measurement. Characters are Unicode scalar values of
/// the normalized text that was actually encoded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CptReport {
    pub char_count: u64,
    pub token_count: u64,
    pub rate: f64,
}

impl CptReport {
    pub fn from_counts(char_count: u64, token_count: u64) -> Result<Self, TokenizerError> {
        if char_count == 0 || token_count == 0 {
            return Err(TokenizerError::EmptyCorpus);
        }
        Ok(CptReport { char_count, token_count, rate: char_count as f64 / token_count as f64 })
    }
}

pub fn char_per_token_rate<S: AsRef<str> + Sync>(tokenizer: &Tokenizer, corpus: &[S]) -> Result<CptReport, TokenizerError> {
    let (chars, tokens) = corpus
        .par_iter()
        .map(|text| {
            let text = tokenizer.normalize(text.as_ref());
            (text.chars().count() as u64, tokenizer.encode(&text).len() as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    CptReport::from_counts(chars, tokens)
}
