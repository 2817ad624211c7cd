use std::fmt;
use std::io;

use linkforge::eval::{CorpusError, EvalError};
use linkforge::kb::KbError;
use linkforge::pipeline::PipelineError;
use linkforge::text::TextError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Output could not be written.
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const BACKEND: i32 = 3;
    /// Corpus, dump or input text could not be parsed.
    pub const INPUT: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Backend(String),
    Input(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Backend(_) => exit::BACKEND,
            CliError::Input(_) => exit::INPUT,
            CliError::Io(_) => exit::IO,
        }
    }

    pub fn io(what: impl fmt::Display, e: io::Error) -> Self {
        CliError::Io(format!("{what}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Backend(m) => write!(f, "backend failure: {m}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let msg = e.to_string();
        match e {
            PipelineError::Config(_) | PipelineError::Dictionary(_) => CliError::Config(msg),
            PipelineError::BackendUnavailable { .. } | PipelineError::Backend { .. } => CliError::Backend(msg),
            PipelineError::Codec(_) | PipelineError::Text(_) => CliError::Input(msg),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<TextError> for CliError {
    fn from(e: TextError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<KbError> for CliError {
    fn from(e: KbError) -> Self {
        CliError::Config(e.to_string())
    }
}
