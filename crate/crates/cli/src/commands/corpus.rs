use std::io::{BufRead, BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use kotoba_core::corpus::{fit_quality_model, write_jsonl, FitOptions, Pipeline, PipelineConfig, QualityModel, Stage, StageToggles};
use kotoba_core::tokenizer::{Normalization, Tokenizer};

use super::print_summary;
use crate::error::CliError;
use crate::io::{load_tokenizer, open, read_string, records};
use crate::{write_output, Format, GlobalArgs};

#[derive(Args, Debug)]
pub struct FilterArgs {
    /// JSON-lines input with `id` and `text` fields.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Where to write the per-stage report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Pipeline configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated stages to run, replacing the configured toggles.
    #[arg(long, value_delimiter = ',')]
    stages: Option<Vec<Stage>>,
    /// Record per-stage verdicts under `meta.pipeline` in the output.
    #[arg(long)]
    annotate: bool,
    /// Tokenizer used to count output tokens; byte-level when omitted.
    #[arg(long)]
    tokenizer: Option<PathBuf>,
    #[arg(long)]
    quality_model: Option<PathBuf>,
    /// Write every stage outcome as JSON lines.
    #[arg(long)]
    outcomes: Option<PathBuf>,
}

pub fn filter(global: &GlobalArgs, args: FilterArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => PipelineConfig::from_json(&read_string(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => PipelineConfig::default(),
    };
    if let Some(stages) = &args.stages {
        config.stages = StageToggles::only(stages);
    }
    config.near_dup.seed = global.seed;
    if let Some(path) = &args.quality_model {
        config.quality_model = Some(path.clone());
    }
    if let Some(path) = &args.tokenizer {
        config.tokenizer = Some(path.clone());
    }

    let tokenizer = match &config.tokenizer {
        Some(path) => load_tokenizer(path)?,
        None => Tokenizer::byte_level(Normalization::Nfkc),
    };
    let model = match &config.quality_model {
        Some(path) => Some(QualityModel::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?),
        None => None,
    };
    let pipeline = Pipeline::new(config, tokenizer, model)?.with_annotations(args.annotate);
    let input = records(&args.input)?;
    let out = pipeline.run(input);

    let mut buf = Vec::new();
    write_jsonl(&mut buf, &out.documents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", args.output.display())))?;
    write_output(&args.output, std::str::from_utf8(&buf).expect("jsonl is utf-8"))?;
    if let Some(path) = &args.report {
        write_output(path, &out.report.to_json())?;
    }
    if let Some(path) = &args.outcomes {
        let file = std::fs::File::create(path).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        for o in &out.outcomes {
            let line = serde_json::to_string(o).expect("outcome serializes");
            writeln!(w, "{line}").map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        }
        w.flush().map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }

    let report = &out.report;
    match global.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Table => {
            println!("{:<12} {:>8} {:>8} {:>8} {:>8} {:>8}", "stage", "enabled", "seen", "kept", "dropped", "modified");
            for s in &report.stages {
                println!(
                    "{:<12} {:>8} {:>8} {:>8} {:>8} {:>8}",
                    s.stage.name(),
                    if s.enabled { "yes" } else { "no" },
                    s.seen,
                    s.kept,
                    s.dropped,
                    s.modified
                );
            }
            println!("documents in {}, out {}, tokens out {}", report.total_documents_in, report.total_documents_out, report.total_tokens_out);
            if !report.redactions.is_empty() {
                let parts: Vec<String> = report.redactions.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("redactions {}", parts.join(" "));
            }
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// JSON lines with `text` and a boolean `label` (true = keep).
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Keep threshold stored in the model.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

pub fn fit(global: &GlobalArgs, args: FitArgs) -> Result<(), CliError> {
    let mut samples = Vec::new();
    for (i, line) in open(&args.train)?.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.train.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| CliError::Input(format!("{}: line {lineno}: {what}", args.train.display()));
        let value: Value = serde_json::from_str(&line).map_err(|_| bad("not a JSON object"))?;
        let text = value.get("text").and_then(Value::as_str).ok_or_else(|| bad("missing string field \"text\""))?;
        let label = value.get("label").and_then(Value::as_bool).ok_or_else(|| bad("missing boolean field \"label\""))?;
        samples.push((text.to_owned(), label));
    }
    let model = fit_quality_model(&samples, FitOptions { threshold: args.threshold, ..FitOptions::default() })?;
    write_output(&args.out, &model.to_json())?;
    let correct = samples.iter().filter(|(t, y)| (model.score(t) >= model.threshold()) == *y).count();
    print_summary(
        global.format,
        &json!({
            "version": 1,
            "samples": samples.len(),
            "positives": samples.iter().filter(|(_, y)| *y).count(),
            "train_accuracy": correct as f64 / samples.len() as f64,
            "threshold": model.threshold(),
            "output": args.out.display().to_string(),
        }),
    );
    Ok(())
}
