use std::collections::HashMap;

use rayon::prelude::*;
use xxhash_rust::xxh3::xxh3_128;

use super::config::NearDupConfig;
use super::document::{Document, Stage, StageOutcome};
use super::minhash::{MinHashSignature, MinHasher};

/// Keeps the first occurrence of each distinct text. Hashing runs in
/// parallel; the index is filled in stream order.
pub fn dedup_exact(docs: Vec<Document>) -> (Vec<Document>, Vec<StageOutcome>) {
    let hashes: Vec<u128> = docs.par_iter().map(|d| xxh3_128(d.text.as_bytes())).collect();
    let mut first: HashMap<u128, usize> = HashMap::with_capacity(docs.len());
    let mut survivors = Vec::with_capacity(docs.len());
    let mut outcomes = Vec::with_capacity(docs.len());
    let mut keep = vec![true; docs.len()];
    for (i, hash) in hashes.iter().enumerate() {
        match first.get(hash) {
            Some(&j) => {
                keep[i] = false;
                outcomes.push(
                    StageOutcome::dropped(&docs[i].doc_id, Stage::ExactDedup, format!("duplicate of {}", docs[j].doc_id))
                        .with_detail("duplicate_of", docs[j].doc_id.as_str()),
                );
            }
            None => {
                first.insert(*hash, i);
                outcomes.push(StageOutcome::kept(&docs[i].doc_id, Stage::ExactDedup));
            }
        }
    }
    for (doc, k) in docs.into_iter().zip(keep) {
        if k {
            survivors.push(doc);
        }
    }
    (survivors, outcomes)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    // The smaller index becomes the root so every root is its cluster's earliest member.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// MinHash/LSH near-duplicate removal. Candidate pairs share at least one
/// band; they are linked when the estimated Jaccard reaches the threshold,
/// and each connected cluster keeps only its earliest document.
pub fn dedup_near(docs: Vec<Document>, config: &NearDupConfig) -> (Vec<Document>, Vec<StageOutcome>) {
    let hasher = MinHasher::new(config.num_permutations, config.shingle_size, config.seed);
    let signatures: Vec<Option<MinHashSignature>> = docs.par_iter().map(|d| hasher.signature(&d.text).ok()).collect();
    let rows = config.rows_per_band();

    let mut uf = UnionFind::new(docs.len());
    let mut links: Vec<Option<(usize, f64)>> = vec![None; docs.len()];
    for band in 0..config.num_bands {
        let mut buckets: HashMap<&[u64], Vec<usize>> = HashMap::new();
        for (i, sig) in signatures.iter().enumerate() {
            if let Some(sig) = sig {
                buckets.entry(&sig.values[band * rows..(band + 1) * rows]).or_default().push(i);
            }
        }
        let mut groups: Vec<Vec<usize>> = buckets.into_values().filter(|g| g.len() > 1).collect();
        groups.sort_unstable_by_key(|g| g[0]);
        for group in groups {
            for (pos, &j) in group.iter().enumerate().skip(1) {
                for &i in &group[..pos] {
                    let (si, sj) = (signatures[i].as_ref().unwrap(), signatures[j].as_ref().unwrap());
                    let estimate = si.estimated_jaccard(sj);
                    if estimate >= config.jaccard_threshold {
                        uf.union(i, j);
                        for (a, b) in [(j, i), (i, j)] {
                            if links[a].is_none_or(|(_, e)| estimate > e) {
                                links[a] = Some((b, estimate));
                            }
                        }
                    }
                }
            }
        }
    }

    let mut outcomes = Vec::with_capacity(docs.len());
    let mut keep = vec![true; docs.len()];
    for i in 0..docs.len() {
        let id = &docs[i].doc_id;
        if signatures[i].is_none() {
            outcomes.push(StageOutcome::kept(id, Stage::NearDedup).with_reason("below shingle length"));
            continue;
        }
        let root = uf.find(i);
        if root == i {
            outcomes.push(StageOutcome::kept(id, Stage::NearDedup));
        } else {
            keep[i] = false;
            // A non-root member was unioned at least once, so it has a link.
            let (partner, estimate) = links[i].expect("linked");
            outcomes.push(
                StageOutcome::dropped(id, Stage::NearDedup, format!("near duplicate of {}", docs[root].doc_id))
                    .with_detail("duplicate_of", docs[root].doc_id.as_str())
                    .with_detail("linked_to", docs[partner].doc_id.as_str())
                    .with_detail("estimated_jaccard", estimate),
            );
        }
    }
    let survivors = docs.into_iter().zip(keep).filter_map(|(d, k)| k.then_some(d)).collect();
    (survivors, outcomes)
}
