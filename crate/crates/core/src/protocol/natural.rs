//! Canonical English forms for persuader actions and their exact inverse.
//!
//! The renderer emits one fixed sentence per appeal group and groups
//! disclosures per proposal. The parser recognises exactly those sentences
//! (case-insensitively) plus a few fixed aliases and ignores anything else.

use crate::model::{Attribute, Cell, CellSet, Effect, Proposal};
use crate::scenario::Scenario;
use crate::target::{render_effects, ActionMessage, Appeals, Disclosure};

pub const EMPTY_MESSAGE: &str = "Okay.";

const ALL_CELLS: &[&str] = &["what do you know about the proposals", "what do you know about each of the proposals"];
const ALL_ATTRIBUTES: &[&str] = &[
    "which attributes do you like",
    "how much do you like each of the attributes",
    "what do you like and dislike",
];
const ALL_PROPOSALS: &[&str] = &["what is your preferred proposal", "what is your top proposal"];

/// Render an action the way a scripted persuader would type it.
pub fn render_action(scenario: &Scenario, action: &ActionMessage) -> String {
    let n = scenario.attribute_names.len();
    let mut parts: Vec<String> = Vec::new();

    let mut disclosures = action.disclosures.clone();
    disclosures.sort_by_key(|d| d.cell);
    let items: Vec<(Cell, Effect)> = disclosures.iter().map(|d| (d.cell, d.claimed_effect)).collect();
    if !items.is_empty() {
        parts.push(render_effects(scenario, &items));
    }

    let info = action.appeals.informational;
    if info == CellSet::all(n) {
        parts.push("What do you know about the proposals?".into());
    } else {
        for p in Proposal::ALL {
            let row = CellSet::of_proposal(p, n);
            if row.is_subset(info) {
                parts.push(format!("What do you know about proposal {}?", scenario.proposal_name(p)));
            } else {
                for c in info.intersection(row).iter() {
                    parts.push(format!(
                        "What do you know about how proposal {} affects {}?",
                        scenario.proposal_name(c.proposal),
                        scenario.attribute_name(c.attribute)
                    ));
                }
            }
        }
    }

    let motivational = &action.appeals.motivational;
    if motivational.len() == n {
        parts.push("Which attributes do you like?".into());
    } else {
        for &a in motivational {
            parts.push(format!("How much do you like {}?", scenario.attribute_name(a)));
        }
    }

    let inferential = &action.appeals.inferential;
    if inferential.len() == Proposal::ALL.len() {
        parts.push("What is your preferred proposal?".into());
    } else {
        for &p in inferential {
            parts.push(format!("What is your utility for proposal {}?", scenario.proposal_name(p)));
        }
    }

    if parts.is_empty() {
        EMPTY_MESSAGE.to_string()
    } else {
        parts.join(" ")
    }
}

/// Split into sentences on `.`, `?` and `!`, normalised to lowercase with
/// single spaces and without the terminator.
fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if matches!(ch, '.' | '?' | '!') {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out.into_iter()
        .map(|s| s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
        .filter(|s| !s.is_empty())
        .collect()
}

fn lower_names<'a>(names: impl Iterator<Item = &'a str>) -> Vec<String> {
    names.map(|n| n.to_lowercase()).collect()
}

struct Names {
    proposals: Vec<String>,
    attributes: Vec<String>,
}

impl Names {
    fn new(scenario: &Scenario) -> Self {
        Names {
            proposals: lower_names(scenario.proposal_names.iter().copied()),
            attributes: lower_names(scenario.attribute_names.iter().copied()),
        }
    }

    fn proposal(&self, s: &str) -> Option<Proposal> {
        self.proposals.iter().position(|n| n == s).and_then(|i| Proposal::new(i).ok())
    }

    fn attribute(&self, s: &str) -> Option<Attribute> {
        self.attributes.iter().position(|n| n == s).and_then(|i| Attribute::new(i).ok())
    }

    /// Split "<proposal name><sep><rest>" for any proposal name.
    fn proposal_prefix<'s>(&self, s: &'s str, sep: &str) -> Option<(Proposal, &'s str)> {
        self.proposals.iter().enumerate().find_map(|(i, n)| {
            s.strip_prefix(n.as_str())
                .and_then(|r| r.strip_prefix(sep))
                .map(|r| (Proposal::new(i).expect("three proposals"), r))
        })
    }
}

fn parse_clause(names: &Names, p: Proposal, clause: &str) -> Option<Disclosure> {
    let clause = clause.strip_prefix("will ")?;
    let (effect, attr) = if let Some(r) = clause.strip_prefix("increase ") {
        (Effect::Increase, r)
    } else if let Some(r) = clause.strip_prefix("decrease ") {
        (Effect::Decrease, r)
    } else {
        let r = clause.strip_prefix("have no effect on ")?;
        (Effect::NoEffect, r)
    };
    Some(Disclosure { cell: Cell::new(p, names.attribute(attr)?), claimed_effect: effect })
}

/// "proposal a will x, will y and will z" with any number of clauses. A
/// sentence with any unparseable clause contributes nothing.
fn parse_disclosures(names: &Names, s: &str) -> Option<Vec<Disclosure>> {
    let rest = s.strip_prefix("proposal ")?;
    let (p, rest) = names.proposal_prefix(rest, " ")?;
    let joined = rest.replace(", and will ", "\u{0}will ").replace(" and will ", "\u{0}will ").replace(", will ", "\u{0}will ");
    joined.split('\u{0}').map(|c| parse_clause(names, p, c)).collect()
}

/// Classify one message by exact sentence patterns.
pub fn parse_message(scenario: &Scenario, text: &str) -> ActionMessage {
    let n = scenario.attribute_names.len();
    let names = Names::new(scenario);
    let mut appeals = Appeals::default();
    let mut disclosures = Vec::new();

    for s in sentences(text) {
        let s = s.as_str();
        if ALL_CELLS.contains(&s) {
            appeals.informational = appeals.informational.union(CellSet::all(n));
        } else if ALL_ATTRIBUTES.contains(&s) {
            appeals.motivational.extend(Attribute::first(n));
        } else if ALL_PROPOSALS.contains(&s) {
            appeals.inferential.extend(Proposal::ALL);
        } else if let Some(rest) = s.strip_prefix("what do you know about how proposal ") {
            if let Some((p, attr)) = names.proposal_prefix(rest, " affects ") {
                if let Some(a) = names.attribute(attr) {
                    appeals.informational.insert(Cell::new(p, a));
                }
            }
        } else if let Some(rest) = s.strip_prefix("what do you know about proposal ") {
            if let Some(p) = names.proposal(rest) {
                appeals.informational = appeals.informational.union(CellSet::of_proposal(p, n));
            }
        } else if let Some(rest) = s.strip_prefix("how much do you like ") {
            if let Some(a) = names.attribute(rest) {
                appeals.motivational.insert(a);
            }
        } else if let Some(rest) = s.strip_prefix("what is your utility for proposal ") {
            if let Some(p) = names.proposal(rest) {
                appeals.inferential.insert(p);
            }
        } else if let Some(ds) = parse_disclosures(&names, s) {
            disclosures.extend(ds);
        }
    }
    ActionMessage::new(appeals, disclosures)
}
