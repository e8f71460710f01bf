use super::model::Tokenizer;
use super::train::{MergeTrainer, TrainerConfig};
use super::vocab::{MergeRule, PieceKind};
use super::TokenizerError;

/// Grafts up to `budget` new pieces learned from `corpus` onto `base`.
///
/// Candidates are taken in learned order: the corpus alphabet by descending
/// frequency, then merge results as the trainer produces them. Candidates
/// already present in `base` are skipped and do not consume budget. Base
/// entries and merges are left untouched; new pieces get kind `extension`
/// and ids from `base.total_size()` upward, and their merge rules are ranked
/// after every base rule.
pub fn extend_vocabulary<I, S>(base: &Tokenizer, corpus: I, budget: usize) -> Result<Tokenizer, TokenizerError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    if budget == 0 {
        return Ok(base.clone());
    }
    let config = TrainerConfig {
        normalization: base.normalization(),
        reserved: base.special_markers().map(str::to_string).collect(),
        ..TrainerConfig::default()
    };
    let mut trainer = MergeTrainer::new(corpus, config);
    if trainer.is_empty() {
        return Err(TokenizerError::EmptyCorpus);
    }

    let mut vocab = base.vocab().clone();
    let mut merges = base.merges().clone();
    let mut added = 0usize;

    let mut buf = [0u8; 4];
    for &(ch, _) in trainer.alphabet() {
        if added == budget {
            break;
        }
        let piece = ch.encode_utf8(&mut buf);
        if !vocab.contains(piece) {
            vocab.push(piece.to_string(), 0, PieceKind::Extension)?;
            added += 1;
        }
    }

    while added < budget {
        let Some(merge) = trainer.next_merge() else { break };
        if vocab.contains(&merge.result) {
            continue;
        }
        let rank = merges.next_rank();
        vocab.push(merge.result.clone(), rank, PieceKind::Extension)?;
        merges.push(MergeRule { left: merge.left, right: merge.right, result: merge.result, rank });
        added += 1;
    }

    Tokenizer::new(vocab, merges, base.normalization())
}
