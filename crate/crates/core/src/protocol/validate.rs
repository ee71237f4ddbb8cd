//! Referee checks applied to every persuader turn before the target sees it.

use serde::{Deserialize, Serialize};

use crate::model::{Cell, Effect, Instance};
use crate::target::ActionMessage;

/// Visible characters of a main message.
pub const MAX_MESSAGE_CHARS: usize = 300;
/// Minimum length of a human message when the check is enabled.
pub const MIN_HUMAN_CHARS: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Reject raw messages shorter than this many characters.
    #[serde(default)]
    pub min_chars: Option<usize>,
}

impl ValidationOptions {
    pub fn human() -> Self {
        ValidationOptions { min_chars: Some(MIN_HUMAN_CHARS) }
    }
}

/// Why a turn was refused. Serialized with a machine-readable `reason`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    #[error("false disclosure about {cell}: claimed {claimed:?}")]
    FalseDisclosure { cell: Cell, claimed: Effect },
    #[error("message has {length} characters, at least {minimum} required")]
    TooShort { length: usize, minimum: usize },
    #[error("malformed action: {detail}")]
    MalformedAction { detail: String },
}

/// Cut a message to at most `limit` characters.
pub fn truncate_message(text: &str, limit: usize) -> &str {
    match text.char_indices().nth(limit) {
        Some((i, _)) => &text[..i],
        None => text,
    }
}

pub fn validate_persuader_message(
    action: &ActionMessage,
    instance: &Instance,
    raw_text: &str,
    options: &ValidationOptions,
) -> Result<(), Rejection> {
    if let Some(minimum) = options.min_chars {
        let length = raw_text.trim().chars().count();
        if length < minimum {
            return Err(Rejection::TooShort { length, minimum });
        }
    }
    let all = instance.all_cells();
    for d in &action.disclosures {
        if !all.contains(d.cell) || instance.matrix.get(d.cell) != d.claimed_effect {
            return Err(Rejection::FalseDisclosure { cell: d.cell, claimed: d.claimed_effect });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{worked_example, A_D};
    use crate::target::Disclosure;

    #[test]
    fn truthful_disclosure_passes() {
        let inst = worked_example();
        let a = ActionMessage::disclose(vec![Disclosure { cell: A_D, claimed_effect: Effect::Decrease }]);
        assert_eq!(validate_persuader_message(&a, &inst, "Proposal A will decrease development speed.", &Default::default()), Ok(()));
    }

    #[test]
    fn false_disclosure_names_cell() {
        let inst = worked_example();
        let a = ActionMessage::disclose(vec![Disclosure { cell: A_D, claimed_effect: Effect::Increase }]);
        assert_eq!(
            validate_persuader_message(&a, &inst, "whatever it is", &Default::default()),
            Err(Rejection::FalseDisclosure { cell: A_D, claimed: Effect::Increase })
        );
    }

    #[test]
    fn short_human_message() {
        let inst = worked_example();
        let r = validate_persuader_message(&ActionMessage::empty(), &inst, "hi", &ValidationOptions::human());
        assert_eq!(r, Err(Rejection::TooShort { length: 2, minimum: 10 }));
        assert!(validate_persuader_message(&ActionMessage::empty(), &inst, "hi", &Default::default()).is_ok());
    }

    #[test]
    fn rejection_reason_tag() {
        let v = serde_json::to_value(Rejection::TooShort { length: 2, minimum: 10 }).unwrap();
        assert_eq!(v["reason"], "too_short");
    }

    #[test]
    fn truncation_counts_chars() {
        let s = "é".repeat(500);
        assert_eq!(truncate_message(&s, 300).chars().count(), 300);
        assert_eq!(truncate_message("short", 300), "short");
    }
}
