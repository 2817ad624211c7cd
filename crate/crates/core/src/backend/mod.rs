//! Client contract for generative backends.
//!
//! Three roles sit behind one [`ModelBackend`] trait: a fine-tuned seq2seq model
//! answering `ner`/`ed`/`e2e` requests, a chat LLM used for augmentation, and
//! an external mention detector. [`HttpBackend`] speaks the JSON contract in
//! [`wire`]; [`MockBackend`] replays recorded answers from a fixture file.

mod http;
mod mock;
pub mod wire;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::MentionSpan;

pub use http::HttpBackend;
pub use mock::{MockBackend, MockFixture};
pub use wire::WireSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Seq2seq,
    Chat,
    NerService,
    Mock,
}

/// Task a seq2seq request asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Ner,
    Ed,
    E2e,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Ner => "ner",
            Task::Ed => "ed",
            Task::E2e => "e2e",
        })
    }
}

fn default_timeout() -> f64 {
    60.0
}
fn default_retries() -> u32 {
    2
}
fn default_max_new_tokens() -> u32 {
    1024
}
fn default_backoff_ms() -> u64 {
    250
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint: String,
    /// Per-request timeout in seconds.
    #[serde(default = "default_timeout")]
    pub timeout: f64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// Sampling temperature for chat backends.
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_new_tokens")]
    pub max_new_tokens: u32,
    /// Delay before the first retry; doubles on each further retry.
    #[serde(default = "default_backoff_ms")]
    pub retry_backoff_ms: u64,
    /// Recorded answers, for `mock` backends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<PathBuf>,
}

impl BackendConfig {
    pub fn http(kind: BackendKind, endpoint: impl Into<String>) -> Self {
        Self {
            kind,
            endpoint: endpoint.into(),
            timeout: default_timeout(),
            max_retries: default_retries(),
            temperature: 0.0,
            max_new_tokens: default_max_new_tokens(),
            retry_backoff_ms: default_backoff_ms(),
            fixture: None,
        }
    }

    pub fn mock(fixture: impl Into<PathBuf>) -> Self {
        Self {
            fixture: Some(fixture.into()),
            ..Self::http(BackendKind::Mock, "")
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        let bad = |m: &str| Err(BackendError::Config(m.to_owned()));
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return bad("timeout must be positive");
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be non-negative");
        }
        match self.kind {
            BackendKind::Mock if self.fixture.is_none() => bad("mock backend needs a fixture file"),
            BackendKind::Mock => Ok(()),
            _ if self.endpoint.is_empty() => bad("backend endpoint is empty"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("request to {endpoint} timed out after {attempts} attempt(s)")]
    Timeout { endpoint: String, attempts: u32 },
    #[error("transport error talking to {endpoint} after {attempts} attempt(s): {message}")]
    Transport {
        endpoint: String,
        attempts: u32,
        message: String,
    },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("mock fixture has no answer for {0}")]
    MockMiss(String),
    #[error("{kind:?} backend does not support {operation}")]
    Unsupported { kind: BackendKind, operation: &'static str },
    #[error("invalid request: {0}")]
    InvalidRequest(&'static str),
    #[error("backend configuration: {0}")]
    Config(String),
}

impl BackendError {
    /// The backend could not be reached at all.
    pub fn is_unavailable(&self) -> bool {
        matches!(self, BackendError::Timeout { .. } | BackendError::Transport { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub task: Task,
    /// Model input with any task suffix already appended.
    pub input: String,
}

impl GenerationRequest {
    pub fn new(task: Task, input: impl Into<String>) -> Result<Self, BackendError> {
        let input = input.into();
        if input.is_empty() {
            return Err(BackendError::InvalidRequest("generation input is empty"));
        }
        Ok(Self { task, input })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub prompt: String,
}

impl ChatRequest {
    pub fn new(prompt: impl Into<String>) -> Result<Self, BackendError> {
        let prompt = prompt.into();
        if prompt.is_empty() {
            return Err(BackendError::InvalidRequest("chat prompt is empty"));
        }
        Ok(Self { prompt })
    }
}

/// A generative backend. Implementations must be shareable across threads.
pub trait ModelBackend: Send + Sync {
    fn generate(&self, req: &GenerationRequest) -> Result<String, BackendError>;

    fn chat(&self, req: &ChatRequest) -> Result<String, BackendError>;

    /// Raw spans from an external mention detector, unvalidated.
    fn recognize(&self, text: &str) -> Result<Vec<WireSpan>, BackendError>;

    fn health(&self) -> Result<(), BackendError> {
        Ok(())
    }
}

/// Shared handle to a backend.
#[derive(Clone)]
pub struct Backend(Arc<dyn ModelBackend>);

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Backend(..)")
    }
}

impl Backend {
    pub fn connect(cfg: &BackendConfig) -> Result<Self, BackendError> {
        cfg.validate()?;
        Ok(match cfg.kind {
            BackendKind::Mock => {
                let path = cfg.fixture.as_ref().expect("validated");
                Self::new(MockBackend::load(path)?)
            }
            _ => Self::new(HttpBackend::new(cfg.clone())),
        })
    }

    pub fn new(backend: impl ModelBackend + 'static) -> Self {
        Self(Arc::new(backend))
    }

    pub fn generate(&self, req: &GenerationRequest) -> Result<String, BackendError> {
        self.0.generate(req)
    }

    pub fn chat(&self, req: &ChatRequest) -> Result<String, BackendError> {
        self.0.chat(req)
    }

    pub fn health(&self) -> Result<(), BackendError> {
        self.0.health()
    }

    /// Mentions detected in `text`. Spans whose surface disagrees with the text,
    /// or that overlap an earlier span, are dropped with a diagnostic.
    pub fn detect_mentions(&self, text: &str) -> Result<(Vec<MentionSpan>, Vec<String>), BackendError> {
        if text.is_empty() {
            return Ok((Vec::new(), Vec::new()));
        }
        let mut raw = self.0.recognize(text)?;
        raw.sort_by_key(|s| (s.start, s.end));
        let mut spans: Vec<MentionSpan> = Vec::with_capacity(raw.len());
        let mut diagnostics = Vec::new();
        for w in raw {
            let span = MentionSpan {
                start: w.start,
                end: w.end,
                surface: w.surface,
            };
            if let Err(e) = span.validate(text) {
                diagnostics.push(format!("ner-service span dropped: {e}"));
                continue;
            }
            if spans.last().is_some_and(|p| p.end > span.start) {
                diagnostics.push(format!(
                    "ner-service span [{}, {}) overlaps a previous span; dropped",
                    span.start, span.end
                ));
                continue;
            }
            spans.push(span);
        }
        Ok((spans, diagnostics))
    }
}
