//! Built-in persuaders and the model adapter.

pub mod model;
pub mod planner;
pub mod prompts;
pub mod random;
pub mod scripted;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::TurnRecord;
use crate::llm::CompletionError;
use crate::model::{Condition, Instance, KnowledgeState};
use crate::protocol::{natural, serialize_action, MessageMode, PersuaderMessage, Rejection};
use crate::scenario::{Flavor, Scenario};
use crate::target::ActionMessage;

pub use model::{split_completion, ModelPersuader};
pub use planner::{plan_bruteforce, BruteforcePersuader, PlanError, PlannerView};
pub use random::{random_baseline_step, DrawSchedule, RandomBaseline};
pub use scripted::{ReplayPersuader, ScriptedPerfect, SilentPersuader};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Default,
    NonMental,
    AddHint,
    PerfectGame,
    DiscreteGame,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::Default, Variant::NonMental, Variant::AddHint, Variant::PerfectGame, Variant::DiscreteGame];

    pub fn mode(self) -> MessageMode {
        match self {
            Variant::DiscreteGame => MessageMode::Discrete,
            _ => MessageMode::Natural,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Default => "default",
            Variant::NonMental => "non_mental",
            Variant::AddHint => "add_hint",
            Variant::PerfectGame => "perfect_game",
            Variant::DiscreteGame => "discrete_game",
        }
    }

    /// The non-mental variant needs a non-mental cover story.
    pub fn check(self, scenario: &Scenario) -> Result<(), PersuaderError> {
        if self == Variant::NonMental && scenario.flavor != Flavor::NonMental {
            return Err(PersuaderError::IncompatibleVariant { variant: self, scenario: scenario.id.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == norm)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersuaderKind {
    Human,
    Model,
    Random,
    ScriptedPerfect,
    Bruteforce,
    Silent,
    Replay,
}

impl PersuaderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PersuaderKind::Human => "human",
            PersuaderKind::Model => "model",
            PersuaderKind::Random => "random",
            PersuaderKind::ScriptedPerfect => "scripted_perfect",
            PersuaderKind::Bruteforce => "bruteforce",
            PersuaderKind::Silent => "silent",
            PersuaderKind::Replay => "replay",
        }
    }
}

impl fmt::Display for PersuaderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PersuaderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use PersuaderKind::*;
        let norm = s.to_ascii_lowercase().replace('-', "_");
        [Human, Model, Random, ScriptedPerfect, Bruteforce, Silent, Replay]
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| format!("unknown persuader `{s}`"))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PersuaderError {
    #[error("variant {variant} cannot be played on scenario `{scenario}`")]
    IncompatibleVariant { variant: Variant, scenario: String },
    #[error("this persuader needs the revealed condition")]
    RequiresRevealed,
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("model unavailable: {0}")]
    ModelUnavailable(String),
    #[error("model returned an empty completion")]
    EmptyCompletion,
    #[error("replay script exhausted at turn {0}")]
    ScriptExhausted(usize),
}

impl From<CompletionError> for PersuaderError {
    fn from(e: CompletionError) -> Self {
        match e {
            CompletionError::Empty => PersuaderError::EmptyCompletion,
            CompletionError::Unavailable(m) => PersuaderError::ModelUnavailable(m),
        }
    }
}

/// Everything a persuader may look at when writing its next message.
pub struct TurnContext<'a> {
    pub instance: &'a Instance,
    pub condition: Condition,
    pub variant: Variant,
    pub mode: MessageMode,
    /// 1-based number of the turn being written.
    pub turn: usize,
    pub num_turns: usize,
    pub history: &'a [TurnRecord],
    /// The target's knowledge, only in the revealed condition.
    pub target_state: Option<&'a KnowledgeState>,
    pub last_rejection: Option<&'a Rejection>,
}

pub trait Persuader: Send {
    fn kind(&self) -> PersuaderKind;

    fn next_message(&mut self, ctx: &TurnContext<'_>) -> Result<PersuaderMessage, PersuaderError>;

    fn on_rejection(&mut self, _rejection: &Rejection) {}
}

/// Render a built-in persuader's action in the session's message mode.
pub fn render_for_mode(action: &ActionMessage, scenario: &Scenario, mode: MessageMode) -> String {
    match mode {
        MessageMode::Natural => natural::render_action(scenario, action),
        MessageMode::Discrete => serialize_action(action, scenario),
    }
}

pub(crate) fn emit(ctx: &TurnContext<'_>, action: &ActionMessage) -> PersuaderMessage {
    PersuaderMessage::text(render_for_mode(action, ctx.instance.scenario(), ctx.mode))
}
