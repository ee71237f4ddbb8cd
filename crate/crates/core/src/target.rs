//! The naively-rational target.
//!
//! The target believes every disclosure, re-chooses the best proposal given
//! what it knows and answers exactly the questions it was asked.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    evaluate_utilities, Attribute, Cell, CellSet, Effect, Instance, KnowledgeState, Proposal,
    UtilityMatrix, ValueFunction, NUM_PROPOSALS,
};
use crate::scenario::Scenario;

pub const CANNED_REPLY: &str = "I am a perfectly rational agent. I will choose the best proposal given what I know. I will echo back information that is revealed to me, and I will answer questions about what I know or like.";

pub const TIE_BREAK_PREFIX: &str =
    "When I prefer the top proposals the same, I choose whichever of them I had preferred first. Right now, that is";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TargetError {
    #[error("untruthful disclosure for {cell}: claimed {claimed:?}, actual {actual:?}")]
    UntruthfulDisclosure { cell: Cell, claimed: Effect, actual: Effect },
    #[error("cell {0} is outside the game's matrix")]
    UnknownCell(Cell),
}

/// Questions about the target's mental state.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Appeals {
    #[serde(default)]
    pub motivational: BTreeSet<Attribute>,
    #[serde(default)]
    pub informational: CellSet,
    #[serde(default)]
    pub inferential: BTreeSet<Proposal>,
}

impl Appeals {
    pub fn is_empty(&self) -> bool {
        self.motivational.is_empty() && self.informational.is_empty() && self.inferential.is_empty()
    }

    /// Appeal to everything: all attributes, all cells and all proposals.
    pub fn everything(num_attributes: usize) -> Self {
        Appeals {
            motivational: Attribute::first(num_attributes).collect(),
            informational: CellSet::all(num_attributes),
            inferential: Proposal::ALL.into_iter().collect(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Disclosure {
    pub cell: Cell,
    pub claimed_effect: Effect,
}

impl Disclosure {
    pub fn truthful(instance: &Instance, cell: Cell) -> Self {
        Disclosure { cell, claimed_effect: instance.matrix.get(cell) }
    }
}

/// One classified persuader turn.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct ActionMessage {
    pub appeals: Appeals,
    pub disclosures: Vec<Disclosure>,
}

#[derive(Deserialize)]
struct RawAction {
    #[serde(default)]
    appeals: Appeals,
    #[serde(default)]
    disclosures: Vec<Disclosure>,
}

impl<'de> Deserialize<'de> for ActionMessage {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawAction::deserialize(d)?;
        Ok(ActionMessage::new(raw.appeals, raw.disclosures))
    }
}

impl ActionMessage {
    /// Build an action; repeated disclosures of one cell collapse to the last.
    pub fn new(appeals: Appeals, disclosures: Vec<Disclosure>) -> Self {
        let mut seen = CellSet::EMPTY;
        let mut kept: Vec<Disclosure> = Vec::with_capacity(disclosures.len());
        for d in disclosures.into_iter().rev() {
            if !seen.contains(d.cell) {
                seen.insert(d.cell);
                kept.push(d);
            }
        }
        kept.reverse();
        ActionMessage { appeals, disclosures: kept }
    }

    pub fn empty() -> Self {
        ActionMessage::default()
    }

    pub fn disclose(disclosures: Vec<Disclosure>) -> Self {
        ActionMessage::new(Appeals::default(), disclosures)
    }

    pub fn is_empty(&self) -> bool {
        self.appeals.is_empty() && self.disclosures.is_empty()
    }

    pub fn disclosed_cells(&self) -> CellSet {
        self.disclosures.iter().map(|d| d.cell).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MotivationalAnswer {
    pub attribute: Attribute,
    pub weight: i32,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct InformationalAnswer {
    pub cell: Cell,
    pub effect: Effect,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ProposalUtility {
    pub proposal: Proposal,
    pub utility: i32,
    pub chosen: bool,
}

/// The target's preference report.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct InferentialAnswer {
    /// The proposals asked about.
    pub asked: BTreeSet<Proposal>,
    /// Utility and chosen flag for every proposal.
    pub utilities: Vec<ProposalUtility>,
}

impl InferentialAnswer {
    pub fn chosen(&self) -> Option<Proposal> {
        self.utilities.iter().find(|u| u.chosen).map(|u| u.proposal)
    }

    pub fn asked_utilities(&self) -> impl Iterator<Item = &ProposalUtility> {
        self.utilities.iter().filter(|u| self.asked.contains(&u.proposal))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TargetReply {
    pub echo: Vec<Disclosure>,
    pub motivational_answers: Vec<MotivationalAnswer>,
    pub informational_answers: Vec<InformationalAnswer>,
    pub inferential_answers: Option<InferentialAnswer>,
    pub canned: bool,
    pub rendered_text: String,
}

impl TargetReply {
    pub fn canned() -> Self {
        TargetReply {
            echo: Vec::new(),
            motivational_answers: Vec::new(),
            informational_answers: Vec::new(),
            inferential_answers: None,
            canned: true,
            rendered_text: CANNED_REPLY.to_string(),
        }
    }
}

/// Add `cells` to the target's knowledge and re-choose once.
pub fn disclose_cells(
    state: &KnowledgeState,
    matrix: &UtilityMatrix,
    values: &ValueFunction,
    cells: CellSet,
) -> KnowledgeState {
    let known = state.known.union(cells);
    let utilities = evaluate_utilities(matrix, values, known);
    let mut next = KnowledgeState { known, ..state.clone() };
    next.update_choice_in_place(&utilities);
    next
}

pub fn apply_disclosures(
    state: &KnowledgeState,
    instance: &Instance,
    disclosures: &[Disclosure],
) -> Result<(KnowledgeState, Vec<Disclosure>), TargetError> {
    let all = instance.all_cells();
    for d in disclosures {
        if !all.contains(d.cell) {
            return Err(TargetError::UnknownCell(d.cell));
        }
        let actual = instance.matrix.get(d.cell);
        if actual != d.claimed_effect {
            return Err(TargetError::UntruthfulDisclosure { cell: d.cell, claimed: d.claimed_effect, actual });
        }
    }
    let cells: CellSet = disclosures.iter().map(|d| d.cell).collect();
    let next = disclose_cells(state, &instance.matrix, &instance.values, cells);
    Ok((next, disclosures.to_vec()))
}

pub fn answer_motivational(values: &ValueFunction, attrs: &BTreeSet<Attribute>) -> Vec<MotivationalAnswer> {
    attrs
        .iter()
        .filter(|a| a.index() < values.num_attributes())
        .map(|&attribute| MotivationalAnswer { attribute, weight: values.weight(attribute) })
        .collect()
}

/// Effects of the asked cells the target knows; unknown cells are omitted.
pub fn answer_informational(state: &KnowledgeState, instance: &Instance, cells: CellSet) -> Vec<InformationalAnswer> {
    cells
        .intersection(state.known)
        .intersection(instance.all_cells())
        .iter()
        .map(|cell| InformationalAnswer { cell, effect: instance.matrix.get(cell) })
        .collect()
}

pub fn answer_inferential(state: &KnowledgeState, instance: &Instance, proposals: &BTreeSet<Proposal>) -> InferentialAnswer {
    let utilities = instance.utilities(state.known);
    InferentialAnswer {
        asked: proposals.clone(),
        utilities: Proposal::ALL
            .into_iter()
            .map(|p| ProposalUtility { proposal: p, utility: utilities[p.index()], chosen: p == state.current_choice })
            .collect(),
    }
}

/// Process one persuader turn: disclosures first, then the appeals are
/// answered against the updated state.
pub fn respond(
    state: &KnowledgeState,
    instance: &Instance,
    action: &ActionMessage,
) -> Result<(KnowledgeState, TargetReply), TargetError> {
    if action.is_empty() {
        return Ok((state.clone(), TargetReply::canned()));
    }
    let (next, echo) = apply_disclosures(state, instance, &action.disclosures)?;
    let appeals = &action.appeals;
    let mut reply = TargetReply {
        echo,
        motivational_answers: answer_motivational(&instance.values, &appeals.motivational),
        informational_answers: answer_informational(&next, instance, appeals.informational),
        inferential_answers: (!appeals.inferential.is_empty())
            .then(|| answer_inferential(&next, instance, &appeals.inferential)),
        canned: false,
        rendered_text: String::new(),
    };
    reply.rendered_text = render_reply(&reply, instance.scenario());
    Ok((next, reply))
}

pub fn final_choice(state: &KnowledgeState) -> Proposal {
    state.current_choice
}

// ---- natural-language rendering ----

fn join_clauses(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

/// "Proposal A will decrease x and will increase y. Proposal C will ..."
/// Cells are grouped per proposal in order of first mention.
pub fn render_effects(scenario: &Scenario, items: &[(Cell, Effect)]) -> String {
    let mut order: Vec<Proposal> = Vec::new();
    for (cell, _) in items {
        if !order.contains(&cell.proposal) {
            order.push(cell.proposal);
        }
    }
    order
        .iter()
        .map(|&p| {
            let clauses: Vec<String> = items
                .iter()
                .filter(|(c, _)| c.proposal == p)
                .map(|(c, e)| format!("will {} {}", e.verb_phrase(), scenario.attribute_name(c.attribute)))
                .collect();
            format!("Proposal {} {}.", scenario.proposal_name(p), join_clauses(&clauses))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn weight_phrase(weight: i32) -> &'static str {
    match weight.signum() {
        1 => "like",
        0 => "feel indifferent to",
        _ => "dislike",
    }
}

pub fn render_motivational(scenario: &Scenario, answers: &[MotivationalAnswer]) -> String {
    if answers.is_empty() {
        return String::new();
    }
    let clauses: Vec<String> = answers
        .iter()
        .map(|a| format!("I {} {}", weight_phrase(a.weight), scenario.attribute_name(a.attribute)))
        .collect();
    format!("{}.", join_clauses(&clauses))
}

fn group_phrase(scenario: &Scenario, group: &[Proposal]) -> String {
    let names: Vec<String> = group.iter().map(|&p| scenario.proposal_name(p).to_string()).collect();
    if names.len() == 1 {
        format!("proposal {}", names[0])
    } else {
        format!("proposals {}", join_clauses(&names))
    }
}

/// Equal-utility groups, best first; members in index order.
pub fn preference_groups(utilities: &[i32; NUM_PROPOSALS]) -> Vec<Vec<Proposal>> {
    let mut levels: Vec<i32> = utilities.to_vec();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    levels
        .into_iter()
        .map(|u| Proposal::ALL.into_iter().filter(|p| utilities[p.index()] == u).collect())
        .collect()
}

pub fn render_inferential(scenario: &Scenario, answer: &InferentialAnswer) -> String {
    let mut utilities = [0i32; NUM_PROPOSALS];
    for u in &answer.utilities {
        utilities[u.proposal.index()] = u.utility;
    }
    let groups = preference_groups(&utilities);
    let mut sentences: Vec<String> = groups
        .iter()
        .filter(|g| g.len() > 1)
        .map(|g| format!("I prefer {} the same.", group_phrase(scenario, g)))
        .collect();
    for pair in groups.windows(2) {
        sentences.push(format!(
            "I prefer {} over {}.",
            group_phrase(scenario, &pair[0]),
            group_phrase(scenario, &pair[1])
        ));
    }
    let mut text = sentences.join(" ");
    if groups[0].len() > 1 {
        if let Some(chosen) = answer.chosen() {
            text.push_str(&format!("\n\n{} {}.", TIE_BREAK_PREFIX, scenario.proposal_name(chosen)));
        }
    }
    text
}

/// Natural-language form of a reply: echo, motivational, informational and
/// inferential parts in that order.
pub fn render_reply(reply: &TargetReply, scenario: &Scenario) -> String {
    if reply.canned {
        return CANNED_REPLY.to_string();
    }
    let echo: Vec<(Cell, Effect)> = reply.echo.iter().map(|d| (d.cell, d.claimed_effect)).collect();
    let info: Vec<(Cell, Effect)> = reply.informational_answers.iter().map(|a| (a.cell, a.effect)).collect();
    let parts = [
        render_effects(scenario, &echo),
        render_motivational(scenario, &reply.motivational_answers),
        render_effects(scenario, &info),
        reply.inferential_answers.as_ref().map(|a| render_inferential(scenario, a)).unwrap_or_default(),
    ];
    parts.into_iter().filter(|p| !p.is_empty()).collect::<Vec<_>>().join(" ")
}
