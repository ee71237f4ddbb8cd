//! Message formats, classification and referee validation.

pub mod classify;
pub mod discrete;
pub mod json;
pub mod natural;
pub mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::Scenario;
use crate::target::{render_reply, TargetReply};

pub use classify::{Classifier, ClassifierBinding, ClassifyError, DialogueMessage, ModelClassifier, Speaker, TemplateClassifier};
pub use discrete::{parse_discrete_action, serialize_action};
pub use validate::{truncate_message, validate_persuader_message, Rejection, ValidationOptions, MAX_MESSAGE_CHARS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("malformed action: {0}")]
    MalformedAction(String),
    #[error("unknown proposal or attribute `{0}`")]
    UnknownName(String),
    #[error("utility {0} is outside {{-1, 0, 1}}")]
    BadUtility(i64),
}

/// Free text classified by a [`Classifier`], or structured JSON actions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageMode {
    #[default]
    Natural,
    Discrete,
}

/// A persuader's turn before classification.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersuaderMessage {
    /// What the target gets to read.
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_of_thought: Option<String>,
    /// The unsplit completion, for model persuaders.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_completion: Option<String>,
    #[serde(default)]
    pub format_violation: bool,
}

impl PersuaderMessage {
    pub fn text(text: impl Into<String>) -> Self {
        PersuaderMessage { text: text.into(), ..Default::default() }
    }
}

pub fn serialize_target_reply(reply: &TargetReply, scenario: &Scenario, mode: MessageMode) -> String {
    match mode {
        MessageMode::Natural => render_reply(reply, scenario),
        MessageMode::Discrete => discrete::serialize_reply(reply, scenario),
    }
}
