use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn kotoba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kotoba"))
        .args(args)
        .env_remove("KOTOBA_SCORER_URL")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn missing_corpus_exits_1_and_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.txt");
    let out = kotoba(&["train-tokenizer", "--corpus", s(&missing), "--merges", "10", "--out", s(&dir.path().join("t.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("absent.txt"));
}

#[test]
fn bad_flag_exits_1() {
    assert_eq!(kotoba(&["measure-cpt", "--nope"]).status.code(), Some(1));
    assert_eq!(kotoba(&["--workers", "0", "measure-cpt", "--tokenizer", "a", "--corpus", "b"]).status.code(), Some(1));
}

#[test]
fn train_measure_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.txt");
    std::fs::write(&corpus, "low lower lowest\nnewer newest wider\n").unwrap();
    let tok = dir.path().join("t.json");
    let out = kotoba(&["--format", "json", "train-tokenizer", "--corpus", s(&corpus), "--merges", "5", "--out", s(&tok)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["merges"], 5);

    let out = kotoba(&["--format", "json", "measure-cpt", "--tokenizer", s(&tok), "--corpus", s(&corpus)]);
    assert!(out.status.success());
    let cpt: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cpt["char_count"], 34);
    let rate = cpt["rate"].as_f64().unwrap();
    assert!((rate - 34.0 / cpt["token_count"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn empty_corpus_cpt_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.txt");
    std::fs::write(&corpus, "abc abd\n").unwrap();
    let tok = dir.path().join("t.json");
    assert!(kotoba(&["train-tokenizer", "--corpus", s(&corpus), "--merges", "2", "--out", s(&tok)]).status.success());
    let empty = dir.path().join("e.txt");
    std::fs::write(&empty, "\n\n").unwrap();
    let out = kotoba(&["measure-cpt", "--tokenizer", s(&tok), "--corpus", s(&empty)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_errors_list_every_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"version": 1, "near_dup": {"num_bands": 7}, "heuristics": {"min_chars": 500, "max_chars": 10}}"#,
    )
    .unwrap();
    let input = fixtures().join("corpus/pipeline_100.jsonl");
    let out = kotoba(&["filter-corpus", "--input", s(&input), "--output", s(&dir.path().join("o.jsonl")), "--config", s(&config)]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("near_dup.num_bands"), "{err}");
    assert!(err.contains("heuristics.min_chars"), "{err}");
}

#[test]
fn unknown_stage_name_is_rejected() {
    let input = fixtures().join("corpus/pipeline_100.jsonl");
    let out = kotoba(&["filter-corpus", "--input", s(&input), "--output", "/dev/null", "--stages", "pii,spellcheck"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn all_dropped_still_succeeds_and_never_leaks_text() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let secret = "ひみつのぶんしょう";
    std::fs::write(
        &input,
        format!("{{\"id\": \"a\", \"text\": \"{secret}\"}}\n{{\"id\": \"a\", \"text\": \"{secret}x\"}}\nnot json {secret}\n"),
    )
    .unwrap();
    let output = dir.path().join("out.jsonl");
    let report = dir.path().join("report.json");
    let out = kotoba(&["filter-corpus", "--input", s(&input), "--output", s(&output), "--report", s(&report)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(!stderr(&out).contains(secret));
    assert!(!String::from_utf8_lossy(&out.stdout).contains(secret));
    assert_eq!(std::fs::read_to_string(&output).unwrap(), "");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["total_documents_in"], 3);
    assert_eq!(report["total_documents_out"], 0);
}

#[test]
fn stage_selection_and_annotation() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixtures().join("corpus/pipeline_100.jsonl");
    let output = dir.path().join("out.jsonl");
    let out = kotoba(&[
        "--format", "json", "filter-corpus", "--input", s(&input), "--output", s(&output), "--stages", "normalize,exact_dedup", "--annotate",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["total_documents_out"], 90);
    let first: Value = serde_json::from_str(std::fs::read_to_string(&output).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["meta"]["pipeline"]["exact_dedup"], "kept");
}

#[test]
fn fit_then_filter_with_classifier() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("q.json");
    let out = kotoba(&["fit-quality", "--train", s(&fixtures().join("corpus/quality_train.jsonl")), "--out", s(&model)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"version": 1, "stages": {"classifier": true}}"#).unwrap();
    let out = kotoba(&[
        "filter-corpus",
        "--input", s(&fixtures().join("corpus/quality_heldout.jsonl")),
        "--output", s(&dir.path().join("o.jsonl")),
        "--config", s(&config),
        "--quality-model", s(&model),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn classifier_without_model_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = kotoba(&[
        "filter-corpus",
        "--input", s(&fixtures().join("corpus/pipeline_100.jsonl")),
        "--output", s(&dir.path().join("o.jsonl")),
        "--stages", "classifier",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_mock_suite_matches_expected() {
    let out = kotoba(&[
        "--format", "json", "eval",
        "--suite", s(&fixtures().join("eval/suite.json")),
        "--mock", s(&fixtures().join("eval/mock_scorer.json")),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(fixtures().join("eval/expected.json")).unwrap()).unwrap();
    for r in report["results"].as_array().unwrap() {
        let want = expected["values"][r["task_name"].as_str().unwrap()].as_f64().unwrap();
        assert!((r["value"].as_f64().unwrap() - want).abs() < 1e-9);
    }
    assert!((report["avg"].as_f64().unwrap() - expected["avg"].as_f64().unwrap()).abs() < 1e-9);
    assert!((report["avg_excl"].as_f64().unwrap() - expected["avg_excl"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn eval_unreachable_backend_exits_2() {
    let out = kotoba(&[
        "eval",
        "--suite", s(&fixtures().join("eval/suite.json")),
        "--scorer", "http",
        "--url", "http://127.0.0.1:9/score",
        "--retries", "0",
        "--timeout-ms", "500",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn eval_lenient_survives_unreachable_backend() {
    let out = kotoba(&[
        "--format", "json", "eval",
        "--suite", s(&fixtures().join("eval/suite.json")),
        "--scorer", "http",
        "--url", "http://127.0.0.1:9/score",
        "--retries", "0",
        "--timeout-ms", "500",
        "--lenient",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["avg"], 0.0);
}

#[test]
fn eval_aggregate_only() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.json");
    std::fs::write(
        &file,
        r#"{"version": 1, "results": [
            {"task_name": "A", "metric_name": "acc", "value": 50.0},
            {"task_name": "B", "metric_name": "em", "value": 70.0},
            {"task_name": "C", "metric_name": "rouge-2", "value": 10.0, "excluded_from_7avg": true}
        ]}"#,
    )
    .unwrap();
    let out = kotoba(&["--format", "json", "eval", "--aggregate-only", s(&file)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report["avg"].as_f64().unwrap() - 130.0 / 3.0).abs() < 1e-12);
    assert_eq!(report["avg_excl"], 60.0);

    let table = kotoba(&["eval", "--aggregate-only", s(&file)]);
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains("C*"));
    assert!(text.contains("43.33"));
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixtures().join("corpus/pipeline_100.jsonl");
    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let out_path = dir.path().join(format!("o{workers}.jsonl"));
        let report = dir.path().join(format!("r{workers}.json"));
        let out = kotoba(&["--workers", workers, "filter-corpus", "--input", s(&input), "--output", s(&out_path), "--report", s(&report)]);
        assert!(out.status.success());
        outputs.push((std::fs::read(&out_path).unwrap(), std::fs::read(&report).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}
