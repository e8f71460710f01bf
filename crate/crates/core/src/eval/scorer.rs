use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::tokenizer::{Normalization, Tokenizer};

#[derive(Debug, thiserror::Error)]
pub enum ScorerError {
    #[error("scorer backend unreachable: {0}")]
    Unreachable(String),
    #[error("scorer backend error: {0}")]
    Backend(String),
    #[error("scorer returned a non-finite loglikelihood")]
    NonFinite,
}

/// A model as seen by the harness. Implementations must be deterministic for
/// fixed inputs.
pub trait ModelScorer: Send + Sync {
    fn loglikelihood(&self, context: &str, continuation: &str) -> Result<f64, ScorerError>;

    fn generate(&self, context: &str, stop_sequences: &[String], max_new_tokens: usize) -> Result<String, ScorerError>;

    /// Whether concurrent calls are safe; when false the harness serializes them.
    fn is_thread_safe(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoglikelihoodEntry {
    /// Matches any context ending with this text.
    #[serde(default)]
    pub context_suffix: String,
    pub continuation: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationEntry {
    #[serde(default)]
    pub context_suffix: String,
    pub text: String,
}

fn default_missing() -> f64 {
    -1e9
}

/// On-disk mock description used by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum MockSpec {
    Lookup {
        #[serde(default)]
        loglikelihood: Vec<LoglikelihoodEntry>,
        #[serde(default)]
        generate: Vec<GenerationEntry>,
        /// Score for unmatched continuations.
        #[serde(default = "default_missing")]
        default_loglikelihood: f64,
    },
    UniformUnigram {
        cost_per_token: f64,
    },
}

#[derive(Clone, Debug)]
enum MockMode {
    Lookup { loglikelihood: Vec<LoglikelihoodEntry>, generate: Vec<GenerationEntry>, default_loglikelihood: f64 },
    Unigram { tokenizer: Tokenizer, cost: f64 },
}

/// Deterministic scorer for tests and dry runs.
#[derive(Clone, Debug)]
pub struct MockScorer {
    mode: MockMode,
}

impl MockScorer {
    /// Longest matching context suffix wins; earlier entries win ties.
    pub fn lookup(loglikelihood: Vec<LoglikelihoodEntry>, generate: Vec<GenerationEntry>, default_loglikelihood: f64) -> Self {
        MockScorer { mode: MockMode::Lookup { loglikelihood, generate, default_loglikelihood } }
    }

    /// Every token costs `cost`; a continuation scores `-tokens * cost`.
    pub fn uniform_unigram(tokenizer: Tokenizer, cost: f64) -> Self {
        MockScorer { mode: MockMode::Unigram { tokenizer, cost } }
    }

    pub fn from_spec(spec: MockSpec, tokenizer: Option<Tokenizer>) -> Self {
        match spec {
            MockSpec::Lookup { loglikelihood, generate, default_loglikelihood } => {
                MockScorer::lookup(loglikelihood, generate, default_loglikelihood)
            }
            MockSpec::UniformUnigram { cost_per_token } => MockScorer::uniform_unigram(
                tokenizer.unwrap_or_else(|| Tokenizer::byte_level(Normalization::None)),
                cost_per_token,
            ),
        }
    }

    pub fn load(path: &Path, tokenizer: Option<Tokenizer>) -> Result<Self, EvalError> {
        let text = fs::read_to_string(path).map_err(|e| EvalError::Io { path: path.to_path_buf(), source: e })?;
        let spec: MockSpec =
            serde_json::from_str(&text).map_err(|e| EvalError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        Ok(MockScorer::from_spec(spec, tokenizer))
    }
}

fn best_match<'a, T>(entries: &'a [T], context: &str, suffix: impl Fn(&T) -> &str, accept: impl Fn(&T) -> bool) -> Option<&'a T> {
    let mut best: Option<&T> = None;
    for e in entries {
        if accept(e) && context.ends_with(suffix(e)) && best.is_none_or(|b| suffix(e).len() > suffix(b).len()) {
            best = Some(e);
        }
    }
    best
}

impl ModelScorer for MockScorer {
    fn loglikelihood(&self, context: &str, continuation: &str) -> Result<f64, ScorerError> {
        match &self.mode {
            MockMode::Lookup { loglikelihood, default_loglikelihood, .. } => Ok(best_match(
                loglikelihood,
                context,
                |e| &e.context_suffix,
                |e| e.continuation == continuation,
            )
            .map_or(*default_loglikelihood, |e| e.value)),
            MockMode::Unigram { tokenizer, cost } => Ok(-(tokenizer.encode(continuation).len() as f64) * cost),
        }
    }

    fn generate(&self, context: &str, _stop: &[String], _max_new_tokens: usize) -> Result<String, ScorerError> {
        match &self.mode {
            MockMode::Lookup { generate, .. } => {
                Ok(best_match(generate, context, |e| &e.context_suffix, |_| true).map(|e| e.text.clone()).unwrap_or_default())
            }
            MockMode::Unigram { .. } => Ok(String::new()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HttpConfig {
    pub url: String,
    pub timeout: Duration,
    pub retries: u32,
}

impl HttpConfig {
    pub const URL_ENV: &'static str = "KOTOBA_SCORER_URL";

    /// The environment variable, when set, overrides `flag_url`.
    pub fn resolve_url(flag_url: Option<&str>) -> Option<String> {
        std::env::var(Self::URL_ENV).ok().filter(|s| !s.is_empty()).or_else(|| flag_url.map(String::from))
    }
}

#[derive(Serialize)]
struct LoglikelihoodRequest<'a> {
    context: &'a str,
    continuation: &'a str,
}

#[derive(Deserialize)]
struct LoglikelihoodResponse {
    loglikelihood: f64,
}

#[derive(Serialize)]
struct GenerateRequest<'a> {
    context: &'a str,
    stop: &'a [String],
    max_new_tokens: usize,
}

#[derive(Deserialize)]
struct GenerateResponse {
    text: String,
}

/// JSON-over-HTTP scorer. Both request kinds are POSTed to one URL and are
/// told apart by their fields.
pub struct HttpScorer {
    agent: ureq::Agent,
    config: HttpConfig,
}

impl HttpScorer {
    pub fn new(config: HttpConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(config.timeout)).build().into();
        HttpScorer { agent, config }
    }

    fn post<Req: Serialize, Resp: for<'de> Deserialize<'de>>(&self, body: &Req) -> Result<Resp, ScorerError> {
        let mut last = ScorerError::Unreachable(self.config.url.clone());
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(100 << attempt.min(6)));
            }
            match self.agent.post(&self.config.url).send_json(body) {
                Ok(mut resp) => {
                    return resp.body_mut().read_json::<Resp>().map_err(|e| ScorerError::Backend(format!("bad response: {e}")));
                }
                Err(ureq::Error::StatusCode(code)) if code < 500 => {
                    return Err(ScorerError::Backend(format!("HTTP {code}")));
                }
                Err(ureq::Error::StatusCode(code)) => last = ScorerError::Backend(format!("HTTP {code}")),
                Err(e) => last = ScorerError::Unreachable(format!("{}: {e}", self.config.url)),
            }
        }
        Err(last)
    }
}

impl ModelScorer for HttpScorer {
    fn loglikelihood(&self, context: &str, continuation: &str) -> Result<f64, ScorerError> {
        let resp: LoglikelihoodResponse = self.post(&LoglikelihoodRequest { context, continuation })?;
        if resp.loglikelihood.is_finite() { Ok(resp.loglikelihood) } else { Err(ScorerError::NonFinite) }
    }

    fn generate(&self, context: &str, stop_sequences: &[String], max_new_tokens: usize) -> Result<String, ScorerError> {
        let resp: GenerateResponse = self.post(&GenerateRequest { context, stop: stop_sequences, max_new_tokens })?;
        Ok(resp.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_prefers_longest_suffix() {
        let scorer = MockScorer::lookup(
            vec![
                LoglikelihoodEntry { context_suffix: "".into(), continuation: " a".into(), value: -1.0 },
                LoglikelihoodEntry { context_suffix: "Q2:".into(), continuation: " a".into(), value: -7.0 },
            ],
            vec![GenerationEntry { context_suffix: "Q2:".into(), text: "hello".into() }],
            -50.0,
        );
        assert_eq!(scorer.loglikelihood("Q1:", " a").unwrap(), -1.0);
        assert_eq!(scorer.loglikelihood("...Q2:", " a").unwrap(), -7.0);
        assert_eq!(scorer.loglikelihood("Q2:", " b").unwrap(), -50.0);
        assert_eq!(scorer.generate("Q2:", &[], 8).unwrap(), "hello");
        assert_eq!(scorer.generate("Q1:", &[], 8).unwrap(), "");
    }

    #[test]
    fn unigram_counts_bytes_with_byte_level_tokenizer() {
        let scorer = MockScorer::uniform_unigram(Tokenizer::byte_level(Normalization::None), 0.5);
        assert_eq!(scorer.loglikelihood("ctx", "東京").unwrap(), -3.0);
    }

    #[test]
    fn unreachable_backend() {
        let scorer = HttpScorer::new(HttpConfig { url: "http://127.0.0.1:9/".into(), timeout: Duration::from_millis(200), retries: 0 });
        assert!(matches!(scorer.loglikelihood("a", "b"), Err(ScorerError::Unreachable(_))));
    }
}
