use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::xxh3_64;

const MERSENNE_61: u64 = (1 << 61) - 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinHashSignature {
    pub values: Vec<u64>,
}

impl MinHashSignature {
    /// Fraction of positions where the two signatures agree.
    pub fn estimated_jaccard(&self, other: &MinHashSignature) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "signature lengths differ");
        if self.values.is_empty() {
            return 0.0;
        }
        let same = self.values.iter().zip(&other.values).filter(|(a, b)| a == b).count();
        same as f64 / self.values.len() as f64
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("document has {chars} characters, fewer than the shingle size {shingle_size}")]
pub struct TooShort {
    pub chars: usize,
    pub shingle_size: usize,
}

/// Character-shingle MinHash with `K` universal hash functions
/// `h_k(x) = (a_k * x + b_k) mod (2^61 - 1)` over a stable 64-bit shingle hash.
#[derive(Clone, Debug)]
pub struct MinHasher {
    shingle_size: usize,
    coefficients: Vec<(u64, u64)>,
}

fn mod_mersenne(x: u128) -> u64 {
    let folded = (x & MERSENNE_61 as u128) + (x >> 61);
    let folded = (folded & MERSENNE_61 as u128) + (folded >> 61);
    let v = folded as u64;
    if v >= MERSENNE_61 { v - MERSENNE_61 } else { v }
}

impl MinHasher {
    pub fn new(num_permutations: usize, shingle_size: usize, seed: u64) -> Self {
        assert!(shingle_size > 0, "shingle size must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coefficients = (0..num_permutations)
            .map(|_| (rng.gen_range(1..MERSENNE_61), rng.gen_range(0..MERSENNE_61)))
            .collect();
        MinHasher { shingle_size, coefficients }
    }

    pub fn num_permutations(&self) -> usize {
        self.coefficients.len()
    }

    pub fn shingle_size(&self) -> usize {
        self.shingle_size
    }

    /// Distinct shingle hashes, sorted.
    fn shingle_hashes(&self, text: &str) -> Result<Vec<u64>, TooShort> {
        let starts: Vec<usize> = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len())).collect();
        let chars = starts.len() - 1;
        if chars < self.shingle_size {
            return Err(TooShort { chars, shingle_size: self.shingle_size });
        }
        let mut hashes: Vec<u64> = (0..=chars - self.shingle_size)
            .map(|i| xxh3_64(&text.as_bytes()[starts[i]..starts[i + self.shingle_size]]) % MERSENNE_61)
            .collect();
        hashes.sort_unstable();
        hashes.dedup();
        Ok(hashes)
    }

    pub fn signature(&self, text: &str) -> Result<MinHashSignature, TooShort> {
        let hashes = self.shingle_hashes(text)?;
        let values = self
            .coefficients
            .iter()
            .map(|&(a, b)| {
                hashes
                    .iter()
                    .map(|&x| mod_mersenne(u128::from(a) * u128::from(x) + u128::from(b)))
                    .min()
                    .expect("at least one shingle")
            })
            .collect();
        Ok(MinHashSignature { values })
    }
}
