use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::document::Stage;
use super::pii::PiiPattern;
use super::CorpusError;

pub const CONFIG_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageToggles {
    pub normalize: bool,
    pub pii: bool,
    pub exact_dedup: bool,
    pub near_dedup: bool,
    pub heuristics: bool,
    pub classifier: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        StageToggles { normalize: true, pii: true, exact_dedup: true, near_dedup: true, heuristics: true, classifier: false }
    }
}

impl StageToggles {
    pub fn none() -> Self {
        StageToggles { normalize: false, pii: false, exact_dedup: false, near_dedup: false, heuristics: false, classifier: false }
    }

    pub fn only(stages: &[Stage]) -> Self {
        let mut toggles = StageToggles::none();
        for &stage in stages {
            toggles.set(stage, true);
        }
        toggles
    }

    pub fn enabled(&self, stage: Stage) -> bool {
        match stage {
            Stage::Normalize => self.normalize,
            Stage::Pii => self.pii,
            Stage::ExactDedup => self.exact_dedup,
            Stage::NearDedup => self.near_dedup,
            Stage::Heuristics => self.heuristics,
            Stage::Classifier => self.classifier,
        }
    }

    pub fn set(&mut self, stage: Stage, on: bool) {
        let slot = match stage {
            Stage::Normalize => &mut self.normalize,
            Stage::Pii => &mut self.pii,
            Stage::ExactDedup => &mut self.exact_dedup,
            Stage::NearDedup => &mut self.near_dedup,
            Stage::Heuristics => &mut self.heuristics,
            Stage::Classifier => &mut self.classifier,
        };
        *slot = on;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NearDupConfig {
    /// Shingle length in characters.
    pub shingle_size: usize,
    pub num_permutations: usize,
    pub num_bands: usize,
    pub jaccard_threshold: f64,
    pub seed: u64,
}

impl Default for NearDupConfig {
    fn default() -> Self {
        NearDupConfig { shingle_size: 5, num_permutations: 128, num_bands: 32, jaccard_threshold: 0.8, seed: 42 }
    }
}

impl NearDupConfig {
    pub fn rows_per_band(&self) -> usize {
        self.num_permutations / self.num_bands
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicConfig {
    pub min_chars: usize,
    pub max_chars: usize,
    pub max_symbol_ratio: f64,
    pub max_repetition_ratio: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig { min_chars: 50, max_chars: 200_000, max_symbol_ratio: 0.3, max_repetition_ratio: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub version: u64,
    pub stages: StageToggles,
    pub near_dup: NearDupConfig,
    pub heuristics: HeuristicConfig,
    /// Overrides the quality model's own threshold when set.
    pub classifier_threshold: Option<f64>,
    pub quality_model: Option<PathBuf>,
    /// Tokenizer artifact used for the output token count.
    pub tokenizer: Option<PathBuf>,
    pub pii_patterns: Vec<PiiPattern>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            version: CONFIG_VERSION,
            stages: StageToggles::default(),
            near_dup: NearDupConfig::default(),
            heuristics: HeuristicConfig::default(),
            classifier_threshold: None,
            quality_model: None,
            tokenizer: None,
            pii_patterns: Vec::new(),
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let config: PipelineConfig =
            serde_json::from_str(text).map_err(|e| CorpusError::Config(vec![e.to_string()]))?;
        if config.version != CONFIG_VERSION {
            return Err(CorpusError::UnsupportedVersion(config.version));
        }
        config.validate()?;
        Ok(config)
    }

    /// Checks every constraint and reports all offending fields at once.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut bad = Vec::new();
        let nd = &self.near_dup;
        if nd.shingle_size == 0 {
            bad.push("near_dup.shingle_size must be positive".to_string());
        }
        if nd.num_permutations == 0 {
            bad.push("near_dup.num_permutations must be positive".to_string());
        }
        if nd.num_bands == 0 || !nd.num_permutations.is_multiple_of(nd.num_bands) {
            bad.push(format!(
                "near_dup.num_bands ({}) must divide near_dup.num_permutations ({})",
                nd.num_bands, nd.num_permutations
            ));
        }
        if !(nd.jaccard_threshold > 0.0 && nd.jaccard_threshold <= 1.0) {
            bad.push(format!("near_dup.jaccard_threshold ({}) must be in (0, 1]", nd.jaccard_threshold));
        }
        let h = &self.heuristics;
        if h.min_chars > h.max_chars {
            bad.push(format!("heuristics.min_chars ({}) exceeds heuristics.max_chars ({})", h.min_chars, h.max_chars));
        }
        for (name, value) in [("heuristics.max_symbol_ratio", h.max_symbol_ratio), ("heuristics.max_repetition_ratio", h.max_repetition_ratio)] {
            if !(0.0..=1.0).contains(&value) {
                bad.push(format!("{name} ({value}) must be in [0, 1]"));
            }
        }
        if let Some(t) = self.classifier_threshold {
            if !(0.0..=1.0).contains(&t) {
                bad.push(format!("classifier_threshold ({t}) must be in [0, 1]"));
            }
        }
        for (i, p) in self.pii_patterns.iter().enumerate() {
            if let Err(e) = regex::Regex::new(&p.pattern) {
                bad.push(format!("pii_patterns[{i}].pattern: {e}"));
            }
            if p.category.is_empty() || p.category == "email" || p.category == "phone" {
                bad.push(format!("pii_patterns[{i}].category must be non-empty and not a built-in"));
            }
        }
        if bad.is_empty() { Ok(()) } else { Err(CorpusError::Config(bad)) }
    }
}
