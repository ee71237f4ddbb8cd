//! Persuader backed by a chat-completion model.

use std::sync::Arc;

use crate::llm::{ChatMessage, CompletionClient};
use crate::model::KnowledgeState;
use crate::protocol::{truncate_message, DialogueMessage, MessageMode, PersuaderMessage, Rejection, MAX_MESSAGE_CHARS};

use super::prompts::{assemble_prompt, Audience};
use super::{Persuader, PersuaderError, PersuaderKind, TurnContext};

pub const DELIMITER: &str = "---";

/// Split a completion into chain of thought and main message at the first
/// delimiter. Without one, the whole completion is the message and the
/// format violation is recorded. `limit` caps the message length.
pub fn split_completion(completion: &str, limit: Option<usize>) -> PersuaderMessage {
    let (cot, body, violation) = match completion.split_once(DELIMITER) {
        Some((cot, body)) => (Some(cot.trim().to_string()), body.trim(), false),
        None => (None, completion.trim(), true),
    };
    let text = match limit {
        Some(l) => truncate_message(body, l),
        None => body,
    };
    PersuaderMessage {
        text: text.to_string(),
        chain_of_thought: cot,
        raw_completion: Some(completion.to_string()),
        format_violation: violation,
    }
}

pub struct ModelPersuader {
    client: Arc<dyn CompletionClient>,
    pending: Option<Rejection>,
}

impl ModelPersuader {
    pub fn new(client: Arc<dyn CompletionClient>) -> Self {
        ModelPersuader { client, pending: None }
    }

    pub fn prompt(&self, ctx: &TurnContext<'_>) -> Result<String, PersuaderError> {
        let history: Vec<DialogueMessage> = ctx
            .history
            .iter()
            .flat_map(|t| [DialogueMessage::persuader(t.message.text.clone()), DialogueMessage::target(t.reply_text.clone())])
            .collect();
        let initial;
        let state = match ctx.target_state {
            Some(s) => s,
            None => {
                initial = KnowledgeState::initial(ctx.instance);
                &initial
            }
        };
        let mut prompt = assemble_prompt(ctx.instance, ctx.condition, ctx.variant, &history, state, Audience::Model)?;
        if let Some(r) = ctx.last_rejection.or(self.pending.as_ref()) {
            prompt.push_str(&format!("\nYour previous message was rejected ({r}). Write a different message.\n"));
        }
        prompt.push_str(&format!("\nThis is message {} of {}.\n", ctx.turn, ctx.num_turns));
        Ok(prompt)
    }
}

impl Persuader for ModelPersuader {
    fn kind(&self) -> PersuaderKind {
        PersuaderKind::Model
    }

    fn next_message(&mut self, ctx: &TurnContext<'_>) -> Result<PersuaderMessage, PersuaderError> {
        let prompt = self.prompt(ctx)?;
        let completion = self.client.complete(&[ChatMessage::user(prompt)])?;
        self.pending = None;
        if completion.trim().is_empty() {
            return Err(PersuaderError::EmptyCompletion);
        }
        // Structured actions are not visible text, so they are not cut.
        let limit = (ctx.mode == MessageMode::Natural).then_some(MAX_MESSAGE_CHARS);
        Ok(split_completion(&completion, limit))
    }

    fn on_rejection(&mut self, rejection: &Rejection) {
        self.pending = Some(rejection.clone());
    }
}
