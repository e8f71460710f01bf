use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use super::model::{Normalization, Tokenizer};
use super::pretokenize::segments;
use super::vocab::{
    looks_like_byte_surface, MergeRule, MergeTable, PieceKind, TokenEntry, Vocabulary, FIRST_PIECE_ID,
    MAX_PIECE_CHARS, SPECIAL_PIECES,
};
use super::TokenizerError;

/// One merge produced by [`MergeTrainer::next_merge`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnedMerge {
    pub left: String,
    pub right: String,
    pub result: String,
    /// Adjacent-pair frequency at the moment the merge was chosen.
    pub count: u64,
}

#[derive(Clone, Debug)]
pub struct TrainerConfig {
    pub normalization: Normalization,
    pub max_piece_chars: usize,
    /// Surfaces that may never be produced by a merge.
    pub reserved: HashSet<String>,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            normalization: Normalization::Nfkc,
            max_piece_chars: MAX_PIECE_CHARS,
            reserved: SPECIAL_PIECES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct QueueKey {
    count: Reverse<u64>,
    left: Arc<str>,
    right: Arc<str>,
    pair: (u32, u32),
}

/// Incremental byte-pair merge trainer.
///
/// Each step picks the most frequent adjacent pair (counting overlapping
/// occurrences); ties go to the lexicographically smallest
/// `(left, right)` by code point. Merges never cross pre-tokenization
/// segments and never produce a piece longer than `max_piece_chars` scalar
/// values.
#[derive(Debug)]
pub struct MergeTrainer {
    config: TrainerConfig,
    symbols: Vec<Arc<str>>,
    symbol_chars: Vec<usize>,
    symbol_ids: HashMap<Arc<str>, u32>,
    words: Vec<Vec<u32>>,
    word_counts: Vec<u64>,
    pair_counts: HashMap<(u32, u32), u64>,
    pair_words: HashMap<(u32, u32), Vec<u32>>,
    queue: BTreeSet<QueueKey>,
    alphabet: Vec<(char, u64)>,
}

fn count_words(texts: &[String], normalization: Normalization) -> HashMap<String, u64> {
    texts
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<String, u64>, text| {
            let text = normalization.apply(text);
            for (start, end) in segments(&text) {
                *acc.entry(text[start..end].to_string()).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (word, n) in b {
                *a.entry(word).or_default() += n;
            }
            a
        })
}

impl MergeTrainer {
    pub fn new<I, S>(corpus: I, config: TrainerConfig) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let texts: Vec<String> = corpus.into_iter().map(Into::into).collect();
        let mut word_map: Vec<(String, u64)> = count_words(&texts, config.normalization).into_iter().collect();
        word_map.sort_unstable();

        let mut trainer = MergeTrainer {
            config,
            symbols: Vec::new(),
            symbol_chars: Vec::new(),
            symbol_ids: HashMap::new(),
            words: Vec::with_capacity(word_map.len()),
            word_counts: Vec::with_capacity(word_map.len()),
            pair_counts: HashMap::new(),
            pair_words: HashMap::new(),
            queue: BTreeSet::new(),
            alphabet: Vec::new(),
        };

        let mut char_counts: HashMap<char, u64> = HashMap::new();
        for (word, count) in word_map {
            let mut buf = [0u8; 4];
            let syms: Vec<u32> = word
                .chars()
                .map(|c| {
                    *char_counts.entry(c).or_default() += count;
                    trainer.intern(c.encode_utf8(&mut buf))
                })
                .collect();
            trainer.words.push(syms);
            trainer.word_counts.push(count);
        }
        let mut alphabet: Vec<(char, u64)> = char_counts.into_iter().collect();
        alphabet.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        trainer.alphabet = alphabet;

        for (idx, word) in trainer.words.iter().enumerate() {
            let count = trainer.word_counts[idx];
            for pair in word.windows(2) {
                let key = (pair[0], pair[1]);
                *trainer.pair_counts.entry(key).or_default() += count;
                trainer.pair_words.entry(key).or_default().push(idx as u32);
            }
        }
        let keys: Vec<QueueKey> = trainer
            .pair_counts
            .iter()
            .filter_map(|(&pair, &count)| trainer.queue_key(pair, count))
            .collect();
        trainer.queue.extend(keys);
        trainer
    }

    /// True when the corpus contained no characters at all.
    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    /// Distinct characters of the normalized corpus, most frequent first
    /// (ties by code point).
    pub fn alphabet(&self) -> &[(char, u64)] {
        &self.alphabet
    }

    fn intern(&mut self, piece: &str) -> u32 {
        if let Some(&id) = self.symbol_ids.get(piece) {
            return id;
        }
        let id = self.symbols.len() as u32;
        let piece: Arc<str> = Arc::from(piece);
        self.symbol_chars.push(piece.chars().count());
        self.symbols.push(piece.clone());
        self.symbol_ids.insert(piece, id);
        id
    }

    fn queue_key(&self, pair: (u32, u32), count: u64) -> Option<QueueKey> {
        if count == 0 {
            return None;
        }
        let (left, right) = (&self.symbols[pair.0 as usize], &self.symbols[pair.1 as usize]);
        if self.symbol_chars[pair.0 as usize] + self.symbol_chars[pair.1 as usize] > self.config.max_piece_chars {
            return None;
        }
        let merged_len = left.len() + right.len();
        if merged_len == 6 || self.config.reserved.iter().any(|r| r.len() == merged_len) {
            let merged = format!("{left}{right}");
            if self.config.reserved.contains(&merged) || looks_like_byte_surface(&merged) {
                return None;
            }
        }
        Some(QueueKey { count: Reverse(count), left: left.clone(), right: right.clone(), pair })
    }

    /// Learns the next merge, or `None` once no eligible pair remains.
    pub fn next_merge(&mut self) -> Option<LearnedMerge> {
        let best = self.queue.pop_first()?;
        let (left, right) = best.pair;
        let merged = format!("{}{}", best.left, best.right);
        let merged_id = self.intern(&merged);

        let mut affected = self.pair_words.remove(&best.pair).unwrap_or_default();
        affected.sort_unstable();
        affected.dedup();

        let mut delta: HashMap<(u32, u32), i64> = HashMap::new();
        for &word_idx in &affected {
            let word = &mut self.words[word_idx as usize];
            if !word.windows(2).any(|p| p[0] == left && p[1] == right) {
                continue;
            }
            let count = self.word_counts[word_idx as usize] as i64;
            for p in word.windows(2) {
                *delta.entry((p[0], p[1])).or_default() -= count;
            }
            let mut merged_word = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == left && word[i + 1] == right {
                    merged_word.push(merged_id);
                    i += 2;
                } else {
                    merged_word.push(word[i]);
                    i += 1;
                }
            }
            *word = merged_word;
            for p in word.windows(2) {
                let key = (p[0], p[1]);
                *delta.entry(key).or_default() += count;
                if key.0 == merged_id || key.1 == merged_id {
                    self.pair_words.entry(key).or_default().push(word_idx);
                }
            }
        }

        let mut changes: Vec<((u32, u32), i64)> = delta.into_iter().filter(|(_, d)| *d != 0).collect();
        changes.sort_unstable();
        for (pair, change) in changes {
            let old = self.pair_counts.get(&pair).copied().unwrap_or(0);
            let new = (old as i64 + change) as u64;
            if let Some(key) = self.queue_key(pair, old) {
                self.queue.remove(&key);
            }
            if new == 0 {
                self.pair_counts.remove(&pair);
            } else {
                self.pair_counts.insert(pair, new);
                if let Some(key) = self.queue_key(pair, new) {
                    self.queue.insert(key);
                }
            }
        }

        Some(LearnedMerge {
            left: best.left.to_string(),
            right: best.right.to_string(),
            result: merged,
            count: best.count.0,
        })
    }
}

/// Trains up to `num_merges` merges. Returns the new pieces (corpus alphabet
/// first, then merge results in learned order, ids from the first free id
/// after the byte tokens) and the merge table.
pub fn train_merges<I, S>(
    corpus: I,
    num_merges: usize,
    normalization: Normalization,
) -> Result<(Vec<TokenEntry>, MergeTable), TokenizerError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let config = TrainerConfig { normalization, ..TrainerConfig::default() };
    let mut trainer = MergeTrainer::new(corpus, config);
    if num_merges > 0 && trainer.is_empty() {
        return Err(TokenizerError::EmptyCorpus);
    }

    let mut entries = Vec::new();
    let mut known: HashSet<String> = HashSet::new();
    let mut next_id = FIRST_PIECE_ID;
    for &(ch, _) in trainer.alphabet() {
        let piece = ch.to_string();
        known.insert(piece.clone());
        entries.push(TokenEntry { piece, id: next_id, rank: 0, kind: PieceKind::Base });
        next_id += 1;
    }
    let mut rules = Vec::new();
    while rules.len() < num_merges {
        let Some(merge) = trainer.next_merge() else { break };
        let rank = rules.len() as u32;
        if known.insert(merge.result.clone()) {
            entries.push(TokenEntry { piece: merge.result.clone(), id: next_id, rank, kind: PieceKind::Base });
            next_id += 1;
        }
        rules.push(MergeRule { left: merge.left, right: merge.right, result: merge.result, rank });
    }
    Ok((entries, MergeTable::new(rules)?))
}

/// Trains a complete tokenizer: specials, byte fallback, corpus alphabet and
/// learned merges.
pub fn train_tokenizer<I, S>(corpus: I, num_merges: usize, normalization: Normalization) -> Result<Tokenizer, TokenizerError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let (entries, merges) = train_merges(corpus, num_merges, normalization)?;
    let mut all = Vocabulary::with_byte_fallback().entries().to_vec();
    all.extend(entries);
    Tokenizer::new(Vocabulary::from_entries(all)?, merges, normalization)
}
