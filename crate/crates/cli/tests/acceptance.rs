//! Acceptance run: one PASS/FAIL line per headline criterion. Runs as a plain
//! binary so the lines reach the terminal without `--nocapture`.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kotoba_core::corpus::{MinHasher, Pipeline, PipelineConfig, Stage};
use kotoba_core::eval::{
    aggregate, centi_units, exact_match, rouge2, score_multiple_choice, MetricResult, ModelScorer, ScorerError, Segmenter,
    Suite,
};
use kotoba_core::tokenizer::{
    char_per_token_rate, extend_vocabulary, train_merges, train_tokenizer, Normalization, Tokenizer, MAX_PIECE_CHARS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(rel: &str) -> PathBuf {
    root().join("fixtures").join(rel)
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn jsonl_texts(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["text"].as_str().unwrap().to_owned())
        .collect()
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit { Err(format!("took {took:.2?}, limit {limit:?}")) } else { Ok(()) }
}

fn aggregation_golden() -> Outcome {
    let start = Instant::now();
    let tables = read_json(&fixture("tables/reported_scores.json"))?;
    let mut rows = 0;
    for table in tables["tables"].as_array().unwrap() {
        let suite = Suite::load(&root().join(format!("suites/{}.json", table["suite"].as_str().unwrap()))).map_err(|e| e.to_string())?;
        for row in table["rows"].as_array().unwrap() {
            let model = row["model"].as_str().unwrap();
            let values = row["values"].as_object().unwrap();
            let mut results = Vec::new();
            for task in &suite.tasks {
                let v = values.get(&task.name).and_then(Value::as_f64).ok_or(format!("{model}: no value for {}", task.name))?;
                results.push(MetricResult {
                    task_name: task.name.clone(),
                    metric_name: task.metric_name.clone(),
                    n_shots: task.n_shots,
                    value: v,
                    instance_count: 0,
                    excluded_from_7avg: task.excluded_from_7avg,
                });
            }
            let report = aggregate(&results).map_err(|e| e.to_string())?;
            let printed = row["avg"].as_f64().unwrap();
            ensure!(
                (centi_units(report.avg) - centi_units(printed)).abs() <= 1,
                "{model} Avg: computed {:.4}, printed {printed}",
                report.avg
            );
            match (row.get("avg_excl").and_then(Value::as_f64), report.avg_excl) {
                (Some(p), Some(c)) => ensure!((centi_units(c) - centi_units(p)).abs() <= 1, "{model} 7-Avg: computed {c:.4}, printed {p}"),
                (None, None) => {}
                (p, c) => return Err(format!("{model}: restricted mean printed {p:?}, computed {c:?}")),
            }
            rows += 1;
        }
    }
    let models: std::collections::BTreeSet<&str> =
        tables["tables"].as_array().unwrap().iter().flat_map(|t| t["rows"].as_array().unwrap()).map(|r| r["model"].as_str().unwrap()).collect();
    ensure!(models.len() == 15, "expected 15 distinct models, found {}", models.len());
    within(Duration::from_secs(1), start)?;
    Ok(format!("{rows} rows, {} models", models.len()))
}

fn shot_counts() -> Outcome {
    let want: &[(&str, &[(&str, usize)])] = &[
        ("ja", &[("JCS", 3), ("JNLI", 3), ("MARC-ja", 3), ("JSQuAD", 2), ("JAQKET", 1), ("XLSum-ja", 1), ("xWino", 0), ("MGSM", 5)]),
        ("en", &[("ARC", 25), ("HellaSwag", 10), ("MMLU", 5), ("TruthfulQA", 6)]),
    ];
    let mut n = 0;
    for (name, tasks) in want {
        let suite = Suite::load(&root().join(format!("suites/{name}.json"))).map_err(|e| e.to_string())?;
        let got: Vec<(&str, usize)> = suite.tasks.iter().map(|t| (t.name.as_str(), t.n_shots)).collect();
        ensure!(&got == tasks, "{name}: {got:?}");
        n += got.len();
    }
    Ok(format!("{n} tasks"))
}

fn random_string(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(0..64);
    (0..len)
        .map(|_| {
            let c = match rng.gen_range(0..8) {
                0 | 1 => rng.gen_range(0x20..0x7F),
                2 => rng.gen_range(0x3041..0x30FF),
                3 => rng.gen_range(0x4E00..0x9FFF),
                4 => rng.gen_range(0x1F300..0x1FAFF),
                5 => rng.gen_range(0x20000..0x2A6DF),
                6 => rng.gen_range(0xFF01..0xFF5E),
                _ => rng.gen_range(0..0x10FFFF),
            };
            char::from_u32(c).unwrap_or('\u{FFFD}')
        })
        .collect()
}

fn round_trip() -> Outcome {
    let base = train_tokenizer(jsonl_texts(&fixture("tokenizer/en_corpus.jsonl")), 200, Normalization::Nfkc).map_err(|e| e.to_string())?;
    let tok = extend_vocabulary(&base, jsonl_texts(&fixture("tokenizer/ja_corpus.jsonl")), 500).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for i in 0..10_000 {
        let s = random_string(&mut rng);
        let back = tok.decode(&tok.encode(&s).ids).map_err(|e| e.to_string())?;
        ensure!(back == s, "string {i} did not round-trip");
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("10000 strings in {:.2?}", start.elapsed()))
}

fn trainer_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alphabet = ['a', 'b', 'c', ' ', 'あ', 'い', '日', '本', '\n'];
    for case in 0..50 {
        let docs = rng.gen_range(1..5);
        let corpus: Vec<String> = (0..docs)
            .map(|_| (0..rng.gen_range(1..50)).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect())
            .collect();
        let total: usize = corpus.iter().map(|t| t.chars().count()).sum();
        ensure!(total <= 200, "generator produced {total} chars");
        let merges = rng.gen_range(0..=10);
        let (_, table) = train_merges(corpus.clone(), merges, Normalization::None).map_err(|e| e.to_string())?;
        let learned: Vec<(String, String)> = table.rules().iter().map(|r| (r.left.clone(), r.right.clone())).collect();
        ensure!(learned == oracle::brute_force_merges(&corpus, merges, MAX_PIECE_CHARS), "corpus {case} differs from the oracle");
    }
    Ok("50 corpora".into())
}

fn cpt_direction() -> Outcome {
    let ja_path = fixture("tokenizer/ja_corpus.jsonl");
    let bytes = fs::metadata(&ja_path).map_err(|e| e.to_string())?.len();
    ensure!(bytes >= 50_000, "Japanese corpus is only {bytes} bytes");
    let start = Instant::now();
    let ja = jsonl_texts(&ja_path);
    let base = train_tokenizer(jsonl_texts(&fixture("tokenizer/en_corpus.jsonl")), 200, Normalization::Nfkc).map_err(|e| e.to_string())?;
    let cjk = base.vocab().entries().iter().any(|e| e.piece.chars().any(|c| ('\u{3040}'..='\u{9FFF}').contains(&c)));
    ensure!(!cjk, "base tokenizer has CJK pieces");
    // Learn on the first four fifths, measure on the rest.
    let split = ja.len() * 4 / 5;
    let (train, held) = ja.split_at(split);
    let extended = extend_vocabulary(&base, train.to_vec(), 2000).map_err(|e| e.to_string())?;
    let before = char_per_token_rate(&base, held).map_err(|e| e.to_string())?.rate;
    let after = char_per_token_rate(&extended, held).map_err(|e| e.to_string())?.rate;
    ensure!(before < 1.0, "base rate {before:.3} is not below 1");
    ensure!(after >= 1.5 * before, "extended rate {after:.3} < 1.5 x {before:.3}");
    within(Duration::from_secs(30), start)?;
    Ok(format!("{bytes} bytes, rate {before:.3} -> {after:.3} on held-out text"))
}

fn vocab_budget() -> Outcome {
    let base = train_tokenizer(jsonl_texts(&fixture("tokenizer/en_corpus.jsonl")), 200, Normalization::Nfkc).map_err(|e| e.to_string())?;
    let ja = jsonl_texts(&fixture("tokenizer/ja_corpus.jsonl"));
    // Everything an unbounded run could add: the whole alphabet and every merge
    // result, minus what the base already has.
    let (entries, _) = train_merges(ja.clone(), usize::MAX, Normalization::Nfkc).map_err(|e| e.to_string())?;
    let available = entries.iter().filter(|e| !base.vocab().contains(&e.piece)).count();
    let mut notes = Vec::new();
    for budget in [0usize, 1, 2000] {
        let ext = extend_vocabulary(&base, ja.clone(), budget).map_err(|e| e.to_string())?;
        let added = ext.vocab().total_size() - base.vocab().total_size();
        ensure!(added == budget.min(available), "budget {budget}: added {added}, available {available}");
        for e in base.vocab().entries() {
            ensure!(ext.vocab().get(e.id).map(|x| &x.piece) == Some(&e.piece), "budget {budget}: base id {} moved", e.id);
        }
        ensure!(ext.merges().rules()[..base.merges().len()] == *base.merges().rules(), "budget {budget}: base merges changed");
        notes.push(format!("{budget}->{added}"));
    }
    Ok(format!("added {} (available {available})", notes.join(", ")))
}

fn pipeline_manifest() -> Outcome {
    let manifest = read_json(&fixture("corpus/pipeline_manifest.json"))?;
    let expected = &manifest["expected_report"];
    let file = fs::File::open(fixture("corpus/pipeline_100.jsonl")).map_err(|e| e.to_string())?;
    let pipeline = Pipeline::new(PipelineConfig::default(), Tokenizer::byte_level(Normalization::Nfkc), None).map_err(|e| e.to_string())?;
    let out = pipeline.run(kotoba_core::corpus::read_jsonl(std::io::BufReader::new(file)));
    out.report.check_invariants()?;
    for stage in Stage::ALL {
        let got = out.report.stage(stage);
        let want = &expected["stages"][stage.name()];
        let got_v = [got.seen, got.kept, got.dropped, got.modified];
        let want_v = ["seen", "kept", "dropped", "modified"].map(|k| want[k].as_u64().unwrap());
        ensure!(got_v == want_v, "{}: {got_v:?} vs {want_v:?}", stage.name());
    }
    let redactions: BTreeMap<String, u64> = serde_json::from_value(expected["redactions"].clone()).unwrap();
    ensure!(out.report.redactions == redactions, "redactions {:?}", out.report.redactions);
    ensure!(out.report.total_documents_out == expected["total_documents_out"].as_u64().unwrap(), "output count");
    let again = pipeline.run(out.documents.clone().into_iter().map(Ok));
    ensure!(again.report.total_dropped() == 0, "rerun dropped {}", again.report.total_dropped());
    ensure!(again.documents == out.documents, "rerun changed documents");
    Ok(format!("{} in, {} out, rerun drops 0", out.report.total_documents_in, out.report.total_documents_out))
}

fn minhash_pairs() -> Outcome {
    let pairs = read_json(&fixture("corpus/minhash_pairs.json"))?;
    let k = pairs["shingle_size"].as_u64().unwrap() as usize;
    let hasher = MinHasher::new(128, k, 42);
    let mut worst: f64 = 0.0;
    let list = pairs["pairs"].as_array().unwrap();
    for (i, p) in list.iter().enumerate() {
        let (a, b) = (p["a"].as_str().unwrap(), p["b"].as_str().unwrap());
        let truth = oracle::exact_jaccard(a, b, k);
        let sa = hasher.signature(a).map_err(|e| e.to_string())?;
        let sb = hasher.signature(b).map_err(|e| e.to_string())?;
        let err = (sa.estimated_jaccard(&sb) - truth).abs();
        ensure!(err <= 0.15, "pair {i}: exact {truth:.3}, error {err:.3}");
        worst = worst.max(err);
    }
    ensure!(list.len() == 20, "expected 20 pairs");
    Ok(format!("20 pairs, worst error {worst:.3}"))
}

struct Fixed(Vec<(&'static str, f64)>);

impl ModelScorer for Fixed {
    fn loglikelihood(&self, _: &str, continuation: &str) -> Result<f64, ScorerError> {
        Ok(self.0.iter().find(|(c, _)| *c == continuation).unwrap().1)
    }

    fn generate(&self, _: &str, _: &[String], _: usize) -> Result<String, ScorerError> {
        Ok(String::new())
    }
}

fn metric_units() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    // Hand counts: hypothesis bigrams / reference bigrams / clipped overlap.
    let rouge_cases = [
        ("東京都", "東京都庁舎", 2.0 / 3.0), // 2/2 precision, 2/4 recall
        ("abcd", "abce", 2.0 / 3.0),
        ("abc", "abd", 0.5),
        ("aaa", "aa", 2.0 / 3.0), // overlap clipped to 1
        ("a", "a", 0.0),
        ("猫が好き", "猫が好き", 1.0),
        ("犬 が", "犬が", 1.0), // whitespace is not a unit
    ];
    for (h, r, want) in rouge_cases {
        let got = rouge2(h, r, Segmenter::Char);
        ensure!(close(got, want), "rouge2({h:?}, {r:?}) = {got}, want {want}");
    }
    ensure!(close(rouge2("the cat sat", "the cat ran", Segmenter::Whitespace), 0.5), "whitespace rouge2");

    let em_cases = [
        ("ＡＢＣ１２３", "abc123", true),
        ("東京。", "東京", true),
        ("「東京」", "東京", true),
        ("東京😀", "東京", true),
        ("  Tokyo  Tower ", "tokyo tower", true),
        ("ﾄｳｷｮｳ", "トウキョウ", true),
        ("東京都", "東京", false),
    ];
    for (p, r, want) in em_cases {
        ensure!(exact_match(p, &[r]) == want, "exact_match({p:?}, {r:?}) != {want}");
    }

    let choices = [" a", " b", " c"];
    let cases: [(&[f64], usize); 3] = [(&[-3.0, -1.0, -2.0], 1), (&[-1.0, -1.0, -5.0], 0), (&[-4.0, -2.0, -2.0], 1)];
    for (scores, want) in cases {
        for shift in [0.0, -7.5, 12.25] {
            let s = Fixed(choices.iter().zip(scores).map(|(c, v)| (*c, v + shift)).collect());
            let (got, _) = score_multiple_choice(&s, "q", &choices).map_err(|e| e.to_string())?;
            ensure!(got == want, "argmax of {scores:?} shifted by {shift} = {got}, want {want}");
        }
    }
    Ok(format!("{} rouge, {} em, 9 argmax cases", rouge_cases.len() + 1, em_cases.len()))
}

fn run_cli(dir: &Path, workers: &str, args: &[String]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kotoba"))
        .current_dir(dir)
        .args(["--workers", workers, "--format", "json"])
        .args(args)
        .env_remove("KOTOBA_SCORER_URL")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let f = |rel: &str| fixture(rel).display().to_string();
    let commands: Vec<(&str, Vec<String>, Vec<&str>)> = vec![
        ("train-tokenizer", vec!["train-tokenizer".into(), "--corpus".into(), f("tokenizer/ja_corpus.jsonl"), "--merges".into(), "300".into(), "--out".into(), "tok.json".into()], vec!["tok.json"]),
        ("extend-vocab", vec!["extend-vocab".into(), "--base".into(), "tok.json".into(), "--corpus".into(), f("tokenizer/en_corpus.jsonl"), "--budget".into(), "300".into(), "--out".into(), "ext.json".into()], vec!["ext.json"]),
        ("measure-cpt", vec!["measure-cpt".into(), "--tokenizer".into(), "ext.json".into(), "--corpus".into(), f("tokenizer/ja_corpus.jsonl")], vec![]),
        ("filter-corpus", vec!["filter-corpus".into(), "--input".into(), f("corpus/pipeline_100.jsonl"), "--output".into(), "out.jsonl".into(), "--report".into(), "report.json".into(), "--outcomes".into(), "outcomes.jsonl".into(), "--annotate".into(), "--tokenizer".into(), "tok.json".into()], vec!["out.jsonl", "report.json", "outcomes.jsonl"]),
        ("fit-quality", vec!["fit-quality".into(), "--train".into(), f("corpus/quality_train.jsonl"), "--out".into(), "q.json".into()], vec!["q.json"]),
        ("filter-corpus (classifier)", vec!["filter-corpus".into(), "--input".into(), f("corpus/quality_heldout.jsonl"), "--output".into(), "qout.jsonl".into(), "--stages".into(), "normalize,classifier".into(), "--quality-model".into(), "q.json".into()], vec!["qout.jsonl"]),
        ("eval", vec!["eval".into(), "--suite".into(), f("eval/suite.json"), "--mock".into(), f("eval/mock_scorer.json"), "--out".into(), "eval.json".into()], vec!["eval.json"]),
        ("eval (aggregate only)", vec!["eval".into(), "--aggregate-only".into(), "results.json".into(), "--out".into(), "agg.json".into()], vec!["agg.json"]),
    ];
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    let results = r#"{"version": 1, "suite": "ja", "results": [
        {"task_name": "JCS", "metric_name": "acc", "value": 84.27},
        {"task_name": "XLSum-ja", "metric_name": "rouge-2", "value": 14.08, "excluded_from_7avg": true},
        {"task_name": "MGSM", "metric_name": "acc", "value": 22.4}]}"#;
    for d in &dirs {
        fs::write(d.path().join("results.json"), results).map_err(|e| e.to_string())?;
    }
    for (name, args, files) in &commands {
        let a = run_cli(dirs[0].path(), "1", args)?;
        let b = run_cli(dirs[1].path(), "8", args)?;
        // Output paths are relative, so stdout is comparable verbatim.
        ensure!(a == b, "{name}: stdout differs");
        for file in files {
            let x = fs::read(dirs[0].path().join(file)).map_err(|e| e.to_string())?;
            let y = fs::read(dirs[1].path().join(file)).map_err(|e| e.to_string())?;
            ensure!(x == y, "{name}: {file} differs");
        }
    }
    Ok(format!("{} invocations", commands.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("aggregation golden", aggregation_golden),
        ("shot-count fidelity", shot_counts),
        ("round-trip property", round_trip),
        ("trainer oracle", trainer_oracle),
        ("CPT direction", cpt_direction),
        ("vocabulary budget", vocab_budget),
        ("pipeline manifest", pipeline_manifest),
        ("MinHash estimate", minhash_pairs),
        ("metric unit suite", metric_units),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(note) => println!("PASS  {name:<22} {note} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<22} {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
