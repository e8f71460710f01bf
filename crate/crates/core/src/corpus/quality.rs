//! Logistic quality classifier over hand-named text features.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::document::{Document, Stage, StageOutcome};
use super::stats::TextStats;
use super::CorpusError;

pub const MODEL_VERSION: u64 = 1;

/// Every feature a model may reference.
pub const FEATURE_NAMES: [&str; 6] =
    ["log_chars", "symbol_ratio", "repetition_ratio", "mean_sentence_chars", "digit_ratio", "kana_share"];

fn feature_value(stats: &TextStats, name: &str) -> f64 {
    match name {
        "log_chars" => (1.0 + stats.chars as f64).ln(),
        "symbol_ratio" => stats.symbol_ratio,
        "repetition_ratio" => stats.repetition_ratio,
        "mean_sentence_chars" => stats.mean_sentence_chars,
        "digit_ratio" => stats.digit_ratio,
        "kana_share" => stats.kana_share(),
        _ => unreachable!("feature names are validated at construction"),
    }
}

pub fn extract_features(text: &str) -> [f64; FEATURE_NAMES.len()] {
    let stats = TextStats::compute(text);
    FEATURE_NAMES.map(|name| feature_value(&stats, name))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u64,
    features: Vec<String>,
    weights: Vec<f64>,
    bias: f64,
    threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualityModel {
    features: Vec<String>,
    weights: Vec<f64>,
    bias: f64,
    threshold: f64,
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl QualityModel {
    pub fn new(features: Vec<String>, weights: Vec<f64>, bias: f64, threshold: f64) -> Result<Self, CorpusError> {
        if features.len() != weights.len() {
            return Err(CorpusError::Model(format!("{} features but {} weights", features.len(), weights.len())));
        }
        if let Some(unknown) = features.iter().find(|f| !FEATURE_NAMES.contains(&f.as_str())) {
            return Err(CorpusError::Model(format!("unknown feature {unknown:?}")));
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(CorpusError::Model(format!("threshold {threshold} outside [0, 1]")));
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(CorpusError::Model("non-finite weight or bias".into()));
        }
        Ok(QualityModel { features, weights, bias, threshold })
    }

    /// All features with zero weight and zero bias; scores every document 0.5.
    pub fn neutral(threshold: f64) -> Result<Self, CorpusError> {
        QualityModel::new(FEATURE_NAMES.map(String::from).to_vec(), vec![0.0; FEATURE_NAMES.len()], 0.0, threshold)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self, CorpusError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(CorpusError::Model(format!("threshold {threshold} outside [0, 1]")));
        }
        self.threshold = threshold;
        Ok(self)
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn score(&self, text: &str) -> f64 {
        let stats = TextStats::compute(text);
        let z: f64 = self.features.iter().zip(&self.weights).map(|(f, w)| w * feature_value(&stats, f)).sum::<f64>() + self.bias;
        logistic(z)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            version: MODEL_VERSION,
            features: self.features.clone(),
            weights: self.weights.clone(),
            bias: self.bias,
            threshold: self.threshold,
        };
        let mut out = serde_json::to_string_pretty(&file).expect("model serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CorpusError::Model(e.to_string()))?;
        match value.get("version").and_then(serde_json::Value::as_u64) {
            Some(MODEL_VERSION) => {}
            Some(v) => return Err(CorpusError::UnsupportedVersion(v)),
            None => return Err(CorpusError::Model("missing integer field `version`".into())),
        }
        let file: ModelFile = serde_json::from_value(value).map_err(|e| CorpusError::Model(e.to_string()))?;
        QualityModel::new(file.features, file.weights, file.bias, file.threshold)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        QualityModel::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

pub fn classify_quality(doc: &Document, model: &QualityModel) -> (f64, StageOutcome) {
    let score = model.score(&doc.text);
    let outcome = if score >= model.threshold {
        StageOutcome::kept(&doc.doc_id, Stage::Classifier)
    } else {
        StageOutcome::dropped(&doc.doc_id, Stage::Classifier, "low quality score")
    };
    (score, outcome.with_detail("score", score))
}

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub iterations: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub threshold: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { iterations: 2000, learning_rate: 0.5, l2: 1e-3, threshold: 0.5 }
    }
}

/// Full-batch gradient descent on standardized features, folded back into
/// raw-feature weights. Deterministic for a given sample order.
pub fn fit_quality_model<S: AsRef<str>>(samples: &[(S, bool)], options: FitOptions) -> Result<QualityModel, CorpusError> {
    if samples.is_empty() {
        return Err(CorpusError::Model("no training samples".into()));
    }
    const D: usize = FEATURE_NAMES.len();
    let xs: Vec<[f64; D]> = samples.iter().map(|(t, _)| extract_features(t.as_ref())).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, y)| if *y { 1.0 } else { 0.0 }).collect();
    let n = xs.len() as f64;

    let mut mean = [0.0; D];
    let mut std = [0.0; D];
    for x in &xs {
        for j in 0..D {
            mean[j] += x[j] / n;
        }
    }
    for x in &xs {
        for j in 0..D {
            std[j] += (x[j] - mean[j]).powi(2) / n;
        }
    }
    for s in &mut std {
        *s = if s.sqrt() > 1e-12 { s.sqrt() } else { 1.0 };
    }
    let zs: Vec<[f64; D]> = xs.iter().map(|x| std::array::from_fn(|j| (x[j] - mean[j]) / std[j])).collect();

    let mut w = [0.0; D];
    let mut b = 0.0;
    for _ in 0..options.iterations {
        let mut grad_w = [0.0; D];
        let mut grad_b = 0.0;
        for (z, y) in zs.iter().zip(&ys) {
            let p = logistic(z.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + b);
            let err = p - y;
            for j in 0..D {
                grad_w[j] += err * z[j] / n;
            }
            grad_b += err / n;
        }
        for j in 0..D {
            w[j] -= options.learning_rate * (grad_w[j] + options.l2 * w[j]);
        }
        b -= options.learning_rate * grad_b;
    }

    let raw_w: Vec<f64> = (0..D).map(|j| w[j] / std[j]).collect();
    let raw_b = b - (0..D).map(|j| w[j] * mean[j] / std[j]).sum::<f64>();
    QualityModel::new(FEATURE_NAMES.map(String::from).to_vec(), raw_w, raw_b, options.threshold)
}
