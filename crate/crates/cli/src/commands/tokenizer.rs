use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use kotoba_core::tokenizer::{char_per_token_rate, extend_vocabulary, train_tokenizer, Normalization, FIRST_PIECE_ID};

use super::print_summary;
use crate::error::CliError;
use crate::io::{load_tokenizer, texts};
use crate::{write_output, GlobalArgs};

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Training corpus: `.jsonl` documents or plain text, one text per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Maximum number of merges to learn.
    #[arg(long)]
    merges: usize,
    #[arg(long)]
    out: PathBuf,
    /// Normalization applied before training and measuring (`nfkc` or `none`).
    #[arg(long, default_value = "nfkc")]
    normalization: Normalization,
}

pub fn train(global: &GlobalArgs, args: TrainArgs) -> Result<(), CliError> {
    let corpus = texts(&args.corpus)?;
    let tokenizer = train_tokenizer(corpus, args.merges, args.normalization)?;
    write_output(&args.out, &tokenizer.to_json())?;
    print_summary(
        global.format,
        &json!({
            "version": 1,
            "pieces": tokenizer.vocab().total_size(),
            "learned_pieces": tokenizer.vocab().total_size() - FIRST_PIECE_ID as usize,
            "merges": tokenizer.merges().len(),
            "output": args.out.display().to_string(),
        }),
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    /// Base tokenizer artifact; its ids are never changed.
    #[arg(long)]
    base: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Maximum number of pieces to add.
    #[arg(long)]
    budget: usize,
    #[arg(long)]
    out: PathBuf,
    /// Texts for the before/after rate comparison; defaults to the corpus.
    #[arg(long)]
    sample: Option<PathBuf>,
}

pub fn extend(global: &GlobalArgs, args: ExtendArgs) -> Result<(), CliError> {
    let base = load_tokenizer(&args.base)?;
    let corpus = texts(&args.corpus)?;
    let sample = match &args.sample {
        Some(path) => texts(path)?,
        None => corpus.clone(),
    };
    let extended = extend_vocabulary(&base, corpus, args.budget)?;
    write_output(&args.out, &extended.to_json())?;
    let before = char_per_token_rate(&base, &sample)?;
    let after = char_per_token_rate(&extended, &sample)?;
    print_summary(
        global.format,
        &json!({
            "version": 1,
            "base_size": base.vocab().total_size(),
            "extended_size": extended.vocab().total_size(),
            "added": extended.vocab().total_size() - base.vocab().total_size(),
            "cpt_base": before.rate,
            "cpt_extended": after.rate,
            "output": args.out.display().to_string(),
        }),
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct CptArgs {
    #[arg(long)]
    tokenizer: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
}

pub fn measure(global: &GlobalArgs, args: CptArgs) -> Result<(), CliError> {
    let tokenizer = load_tokenizer(&args.tokenizer)?;
    let corpus = texts(&args.corpus)?;
    let report = char_per_token_rate(&tokenizer, &corpus)?;
    print_summary(
        global.format,
        &json!({
            "version": 1,
            "char_count": report.char_count,
            "token_count": report.token_count,
            "rate": report.rate,
        }),
    );
    Ok(())
}
