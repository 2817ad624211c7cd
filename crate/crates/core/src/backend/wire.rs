//! JSON bodies of the backend HTTP contract.
//!
//! | endpoint            | request                   | response          |
//! |---------------------|---------------------------|-------------------|
//! | `POST /v1/generate` | [`GenerateBody`]          | [`GenerateReply`] |
//! | `POST /v1/chat`     | [`ChatBody`]              | [`ChatReply`]     |
//! | `POST /v1/ner`      | [`NerBody`]               | [`NerReply`]      |
//! | `GET /health`       |                           | [`HealthReply`]   |
//!
//! Span offsets are Unicode code points.

use serde::{Deserialize, Serialize};

use super::Task;

pub const GENERATE_PATH: &str = "/v1/generate";
pub const CHAT_PATH: &str = "/v1/chat";
pub const NER_PATH: &str = "/v1/ner";
pub const HEALTH_PATH: &str = "/health";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateBody {
    pub task: Task,
    pub input: String,
    pub max_new_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateReply {
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatBody {
    pub prompt: String,
    pub temperature: f64,
    pub max_new_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatReply {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerBody {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireSpan {
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerReply {
    pub spans: Vec<WireSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthReply {
    pub status: String,
}
