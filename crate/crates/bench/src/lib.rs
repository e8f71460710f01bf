//! Shared fixture loading for the benchmarks.

use std::fs;
use std::path::{Path, PathBuf};

use kotoba_core::corpus::{read_jsonl, Document};

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

/// The `text` field of every line of a JSON-lines fixture.
pub fn texts(rel: &str) -> Vec<String> {
    documents(rel).into_iter().map(|d| d.text).collect()
}

pub fn documents(rel: &str) -> Vec<Document> {
    let file = fs::File::open(fixture(rel)).expect("fixture exists");
    read_jsonl(std::io::BufReader::new(file)).map(|r| r.expect("fixture parses")).collect()
}
