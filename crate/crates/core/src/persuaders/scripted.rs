//! Scripted persuaders: the perfect-play script, silence and verbatim replay.

use crate::model::{Attribute, CellSet, KnowledgeState, ValueFunction};
use crate::protocol::PersuaderMessage;
use crate::target::{ActionMessage, Appeals, TargetReply};

use super::planner::{disclosure_action, plan_bruteforce, PlannerView};
use super::{emit, Persuader, PersuaderError, PersuaderKind, TurnContext};

/// Ask about everything, ask for the preferred proposal, then disclose a
/// minimal winning set and idle.
#[derive(Debug, Default)]
pub struct ScriptedPerfect;

/// Rebuild the target's values, knowledge and choice from the answers to
/// the first two turns.
pub fn infer_view(n: usize, first: &TargetReply, second: &TargetReply) -> Option<PlannerView> {
    let mut weights = vec![0i64; n];
    let mut seen = 0;
    for m in &first.motivational_answers {
        weights[m.attribute.index()] = m.weight as i64;
        seen += 1;
    }
    if seen != n {
        return None;
    }
    let known: CellSet = first.informational_answers.iter().map(|a| a.cell).collect();
    let choice = second.inferential_answers.as_ref()?.chosen()?;
    Some(PlannerView { values: ValueFunction::new(&weights).ok()?, state: KnowledgeState::with_choice(known, choice) })
}

impl ScriptedPerfect {
    pub fn step(ctx: &TurnContext<'_>) -> Result<ActionMessage, PersuaderError> {
        let n = ctx.instance.num_attributes();
        let action = match ctx.turn {
            1 => ActionMessage::new(
                Appeals {
                    motivational: Attribute::first(n).collect(),
                    informational: CellSet::all(n),
                    ..Default::default()
                },
                vec![],
            ),
            2 => ActionMessage::new(Appeals { inferential: Appeals::everything(n).inferential, ..Default::default() }, vec![]),
            3 => {
                let view = match ctx.history {
                    [first, second, ..] => infer_view(n, &first.reply, &second.reply),
                    _ => None,
                };
                match view {
                    Some(view) => disclosure_action(ctx.instance, plan_bruteforce(&view, ctx.instance, ctx.instance.goal)?),
                    None => ActionMessage::empty(),
                }
            }
            _ => ActionMessage::empty(),
        };
        Ok(action)
    }
}

impl Persuader for ScriptedPerfect {
    fn kind(&self) -> PersuaderKind {
        PersuaderKind::ScriptedPerfect
    }

    fn next_message(&mut self, ctx: &TurnContext<'_>) -> Result<PersuaderMessage, PersuaderError> {
        Ok(emit(ctx, &Self::step(ctx)?))
    }
}

/// Sends nothing of substance.
#[derive(Debug, Default)]
pub struct SilentPersuader;

impl Persuader for SilentPersuader {
    fn kind(&self) -> PersuaderKind {
        PersuaderKind::Silent
    }

    fn next_message(&mut self, ctx: &TurnContext<'_>) -> Result<PersuaderMessage, PersuaderError> {
        Ok(emit(ctx, &ActionMessage::empty()))
    }
}

/// Re-sends recorded messages in order, one per call.
#[derive(Debug, Default)]
pub struct ReplayPersuader {
    messages: std::collections::VecDeque<PersuaderMessage>,
}

impl ReplayPersuader {
    pub fn new<I: IntoIterator<Item = PersuaderMessage>>(messages: I) -> Self {
        ReplayPersuader { messages: messages.into_iter().collect() }
    }

    pub fn from_texts<I: IntoIterator<Item = S>, S: Into<String>>(texts: I) -> Self {
        Self::new(texts.into_iter().map(|t| PersuaderMessage::text(t)))
    }
}

impl Persuader for ReplayPersuader {
    fn kind(&self) -> PersuaderKind {
        PersuaderKind::Replay
    }

    fn next_message(&mut self, ctx: &TurnContext<'_>) -> Result<PersuaderMessage, PersuaderError> {
        self.messages.pop_front().ok_or(PersuaderError::ScriptExhausted(ctx.turn))
    }
}
