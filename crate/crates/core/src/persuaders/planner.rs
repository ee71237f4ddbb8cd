//! Minimal winning disclosure search and the persuader built on it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CellSet, Condition, Instance, KnowledgeState, Proposal, ValueFunction};
use crate::protocol::PersuaderMessage;
use crate::target::{disclose_cells, ActionMessage, Disclosure};

use super::{emit, Persuader, PersuaderError, PersuaderKind, TurnContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("no disclosure of the remaining cells makes the target choose the goal")]
    NoWinningSet,
}

/// The target as the persuader understands it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannerView {
    pub values: ValueFunction,
    pub state: KnowledgeState,
}

impl PlannerView {
    pub fn exact(instance: &Instance, state: &KnowledgeState) -> Self {
        PlannerView { values: instance.values, state: state.clone() }
    }
}

/// Smallest set of cells unknown to the target whose single-message
/// disclosure leaves it choosing `goal`; ties go to the lexicographically
/// first set of cells.
pub fn plan_bruteforce(view: &PlannerView, instance: &Instance, goal: Proposal) -> Result<CellSet, PlanError> {
    let candidates = instance.all_cells().difference(view.state.known);
    let mut subsets: Vec<CellSet> = candidates.subsets().collect();
    subsets.sort_by_key(|s| (s.len(), s.sorted_cells()));
    subsets
        .into_iter()
        .find(|&s| disclose_cells(&view.state, &instance.matrix, &view.values, s).current_choice == goal)
        .ok_or(PlanError::NoWinningSet)
}

pub fn disclosure_action(instance: &Instance, cells: CellSet) -> ActionMessage {
    ActionMessage::disclose(cells.iter().map(|c| Disclosure::truthful(instance, c)).collect())
}

/// Plans against the target's visible state each turn. Only playable in the
/// revealed condition.
#[derive(Debug, Default)]
pub struct BruteforcePersuader;

impl Persuader for BruteforcePersuader {
    fn kind(&self) -> PersuaderKind {
        PersuaderKind::Bruteforce
    }

    fn next_message(&mut self, ctx: &TurnContext<'_>) -> Result<PersuaderMessage, PersuaderError> {
        let state = match (ctx.condition, ctx.target_state) {
            (Condition::Revealed, Some(s)) => s,
            _ => return Err(PersuaderError::RequiresRevealed),
        };
        let view = PlannerView::exact(ctx.instance, state);
        let action = match plan_bruteforce(&view, ctx.instance, ctx.instance.goal) {
            Ok(cells) => disclosure_action(ctx.instance, cells),
            Err(PlanError::NoWinningSet) => ActionMessage::empty(),
        };
        Ok(emit(ctx, &action))
    }
}
