//! What the persuader gets to see.

use serde::{Deserialize, Serialize};

use crate::model::{Attribute, Cell, CellSet, Condition, Effect, Instance, KnowledgeState, Proposal};
use crate::scenario::{Flavor, Scenario};
use crate::target::{render_effects, weight_phrase};

/// The other player's panel, present only in the revealed condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetPanel {
    pub known_cells: Vec<Cell>,
    /// One line per proposal with at least one known cell.
    pub knowledge_lines: Vec<String>,
    pub value_sentences: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersuaderView {
    pub scenario: String,
    pub cover_story: String,
    pub proposal_names: Vec<String>,
    pub attribute_names: Vec<String>,
    pub goal: Proposal,
    pub goal_name: String,
    /// The full matrix, one line per proposal.
    pub knowledge_lines: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetPanel>,
}

fn proposal_lines(scenario: &Scenario, instance: &Instance, cells: CellSet) -> Vec<String> {
    Proposal::ALL
        .into_iter()
        .filter_map(|p| {
            let items: Vec<(Cell, Effect)> = cells
                .intersection(CellSet::of_proposal(p, instance.num_attributes()))
                .iter()
                .map(|c| (c, instance.matrix.get(c)))
                .collect();
            (!items.is_empty()).then(|| render_effects(scenario, &items))
        })
        .collect()
}

fn other(scenario: &Scenario) -> &'static str {
    match scenario.flavor {
        Flavor::Mental => "They",
        Flavor::NonMental => "The system",
    }
}

/// The view at game start.
pub fn render_persuader_view(instance: &Instance, condition: Condition) -> PersuaderView {
    render_view_for_state(instance, condition, &KnowledgeState::initial(instance))
}

/// The view given the target's current knowledge.
pub fn render_view_for_state(instance: &Instance, condition: Condition, state: &KnowledgeState) -> PersuaderView {
    let sc = instance.scenario();
    let target = (condition == Condition::Revealed).then(|| {
        let verb = |w: i32| match (sc.flavor, w.signum()) {
            (Flavor::NonMental, 1) => "wants to maximize",
            (Flavor::NonMental, 0) => "does not care about",
            (Flavor::NonMental, _) => "wants to minimize",
            (Flavor::Mental, _) => weight_phrase(w),
        };
        TargetPanel {
            known_cells: state.known.sorted_cells(),
            knowledge_lines: proposal_lines(sc, instance, state.known),
            value_sentences: Attribute::first(instance.num_attributes())
                .map(|a| format!("{} {} {}.", other(sc), verb(instance.values.weight(a)), sc.attribute_name(a)))
                .collect(),
        }
    });
    PersuaderView {
        scenario: sc.id.to_string(),
        cover_story: sc.cover_story.to_string(),
        proposal_names: sc.proposal_names.iter().map(|s| s.to_string()).collect(),
        attribute_names: sc.attribute_names.iter().map(|s| s.to_string()).collect(),
        goal: instance.goal,
        goal_name: sc.proposal_name(instance.goal).to_string(),
        knowledge_lines: proposal_lines(sc, instance, instance.all_cells()),
        target,
    }
}

impl PersuaderView {
    /// Markdown rendering used in prompts.
    pub fn to_text(&self, flavor: Flavor) -> String {
        let (choice, other) = match flavor {
            Flavor::Mental => ("proposal", "the other player"),
            Flavor::NonMental => ("choice", "the system"),
        };
        let mut out = format!("### Scenario\n\n{}\n\n", self.cover_story);
        out.push_str(&format!(
            "You want {other} to choose {choice} {}.\n\n### What you know\n\n",
            self.goal_name
        ));
        for line in &self.knowledge_lines {
            out.push_str(&format!("- {line}\n"));
        }
        if let Some(t) = &self.target {
            let heading = match flavor {
                Flavor::Mental => "What the other player knows",
                Flavor::NonMental => "What the system knows",
            };
            out.push_str(&format!("\n### {heading}\n\n"));
            for line in &t.knowledge_lines {
                out.push_str(&format!("- {line}\n"));
            }
            out.push('\n');
            for s in &t.value_sentences {
                out.push_str(&format!("- {s}\n"));
            }
        }
        out
    }
}
