use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BackendError, ChatRequest, GenerationRequest, ModelBackend, Task, WireSpan};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedGenerate {
    pub task: Task,
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedChat {
    pub prompt: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedNer {
    pub text: String,
    pub spans: Vec<WireSpan>,
}

/// Recorded request/response pairs, in the shape of the wire bodies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockFixture {
    #[serde(default)]
    pub generate: Vec<RecordedGenerate>,
    #[serde(default)]
    pub chat: Vec<RecordedChat>,
    #[serde(default)]
    pub ner: Vec<RecordedNer>,
}

impl MockFixture {
    pub fn with_generate(mut self, task: Task, input: impl Into<String>, output: impl Into<String>) -> Self {
        self.generate.push(RecordedGenerate {
            task,
            input: input.into(),
            output: output.into(),
        });
        self
    }

    pub fn with_chat(mut self, prompt: impl Into<String>, text: impl Into<String>) -> Self {
        self.chat.push(RecordedChat {
            prompt: prompt.into(),
            text: text.into(),
        });
        self
    }

    pub fn with_ner(mut self, text: impl Into<String>, spans: Vec<WireSpan>) -> Self {
        self.ner.push(RecordedNer {
            text: text.into(),
            spans,
        });
        self
    }
}

/// Deterministic backend answering from a [`MockFixture`]. Unknown requests fail
/// with [`BackendError::MockMiss`]. Later recordings of the same request win.
#[derive(Debug, Clone, Default)]
pub struct MockBackend {
    generate: HashMap<(Task, String), String>,
    chat: HashMap<String, String>,
    ner: HashMap<String, Vec<WireSpan>>,
}

impl MockBackend {
    pub fn from_fixture(fixture: MockFixture) -> Self {
        Self {
            generate: fixture.generate.into_iter().map(|r| ((r.task, r.input), r.output)).collect(),
            chat: fixture.chat.into_iter().map(|r| (r.prompt, r.text)).collect(),
            ner: fixture.ner.into_iter().map(|r| (r.text, r.spans)).collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        let path = path.as_ref();
        let body = fs::read_to_string(path)
            .map_err(|e| BackendError::Config(format!("reading fixture {}: {e}", path.display())))?;
        let fixture: MockFixture = serde_json::from_str(&body)
            .map_err(|e| BackendError::Config(format!("parsing fixture {}: {e}", path.display())))?;
        Ok(Self::from_fixture(fixture))
    }
}

fn preview(s: &str) -> String {
    let head: String = s.chars().take(60).collect();
    if head.len() < s.len() {
        format!("{head:?}…")
    } else {
        format!("{head:?}")
    }
}

impl ModelBackend for MockBackend {
    fn generate(&self, req: &GenerationRequest) -> Result<String, BackendError> {
        self.generate
            .get(&(req.task, req.input.clone()))
            .cloned()
            .ok_or_else(|| BackendError::MockMiss(format!("{} {}", req.task, preview(&req.input))))
    }

    fn chat(&self, req: &ChatRequest) -> Result<String, BackendError> {
        self.chat
            .get(&req.prompt)
            .cloned()
            .ok_or_else(|| BackendError::MockMiss(format!("chat {}", preview(&req.prompt))))
    }

    fn recognize(&self, text: &str) -> Result<Vec<WireSpan>, BackendError> {
        self.ner
            .get(text)
            .cloned()
            .ok_or_else(|| BackendError::MockMiss(format!("ner {}", preview(text))))
    }
}
