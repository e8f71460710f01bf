use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use kotoba_core::corpus::{read_jsonl, Record};
use kotoba_core::tokenizer::Tokenizer;

use crate::error::CliError;

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn read_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn records(path: &Path) -> Result<Vec<Record>, CliError> {
    Ok(read_jsonl(open(path)?).collect())
}

fn is_jsonl(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "jsonl")
}

/// Texts of a corpus: the `text` field of every record for `.jsonl` files,
/// otherwise one text per non-empty line.
pub fn texts(path: &Path) -> Result<Vec<String>, CliError> {
    if is_jsonl(path) {
        records(path)?
            .into_iter()
            .map(|r| r.map(|d| d.text).map_err(|e| CliError::Input(format!("{}: line {}: {}", path.display(), e.line, e.message))))
            .collect()
    } else {
        let mut out = Vec::new();
        for line in open(path)?.lines() {
            let line = line.map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            if !line.trim().is_empty() {
                out.push(line);
            }
        }
        Ok(out)
    }
}

pub fn load_tokenizer(path: &Path) -> Result<Tokenizer, CliError> {
    Tokenizer::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
