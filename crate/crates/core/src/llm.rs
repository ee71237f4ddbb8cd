//! Transport-agnostic chat-completion interface used by the model persuader
//! and the model-backed classifier.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChatRole {
    System,
    User,
    Assistant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: ChatRole,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: ChatRole::User, content: content.into() }
    }

    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: ChatRole::System, content: content.into() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("model endpoint unavailable: {0}")]
    Unavailable(String),
    #[error("model returned an empty completion")]
    Empty,
}

pub trait CompletionClient: Send + Sync {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, CompletionError>;
}

/// Where to reach a chat-completion model. The API key is read from the
/// named environment variable at call time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEndpoint {
    pub base_url: String,
    pub model: String,
    #[serde(default)]
    pub temperature: Option<f32>,
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
}

fn default_key_env() -> String {
    "OPENAI_API_KEY".to_string()
}

impl ModelEndpoint {
    /// Read `MINDGAMES_MODEL_URL`, `MINDGAMES_MODEL` and optionally
    /// `MINDGAMES_TEMPERATURE` / `MINDGAMES_API_KEY_ENV`.
    pub fn from_env() -> Option<Self> {
        let base_url = std::env::var("MINDGAMES_MODEL_URL").ok()?;
        let model = std::env::var("MINDGAMES_MODEL").ok()?;
        Some(ModelEndpoint {
            base_url,
            model,
            temperature: std::env::var("MINDGAMES_TEMPERATURE").ok().and_then(|t| t.parse().ok()),
            api_key_env: std::env::var("MINDGAMES_API_KEY_ENV").unwrap_or_else(|_| default_key_env()),
        })
    }
}

/// Replays canned completions in order; handy for tests and dry runs.
#[derive(Debug, Default)]
pub struct ScriptedClient {
    replies: std::sync::Mutex<std::collections::VecDeque<Result<String, CompletionError>>>,
    pub seen: std::sync::Mutex<Vec<Vec<ChatMessage>>>,
}

impl ScriptedClient {
    pub fn new<I: IntoIterator<Item = Result<String, CompletionError>>>(replies: I) -> Self {
        ScriptedClient { replies: std::sync::Mutex::new(replies.into_iter().collect()), seen: Default::default() }
    }
}

impl CompletionClient for ScriptedClient {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, CompletionError> {
        self.seen.lock().expect("lock").push(messages.to_vec());
        self.replies
            .lock()
            .expect("lock")
            .pop_front()
            .unwrap_or_else(|| Err(CompletionError::Unavailable("script exhausted".into())))
    }
}
