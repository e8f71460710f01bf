use kotoba_core::corpus::CorpusError;
use kotoba_core::eval::EvalError;
use kotoba_core::tokenizer::TokenizerError;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent input; exit 1.
    Input(String),
    /// The model backend failed or could not be reached; exit 2.
    Backend(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Backend(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Backend(m) => f.write_str(m),
        }
    }
}

impl From<TokenizerError> for CliError {
    fn from(e: TokenizerError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        if e.is_backend() { CliError::Backend(e.to_string()) } else { CliError::Input(e.to_string()) }
    }
}
