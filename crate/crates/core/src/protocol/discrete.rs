//! The structured action and reply format of the discrete game.
//!
//! Proposals and attributes travel by their scenario names, effects and
//! weights as integers in {-1, 0, 1}.

use serde::{Deserialize, Serialize};

use crate::model::{Attribute, Cell, Effect, Proposal};
use crate::scenario::Scenario;
use crate::target::{ActionMessage, Appeals, Disclosure, TargetReply};

use super::{json, ProtocolError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRef {
    pub proposal: String,
    pub attribute: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellUtility {
    pub proposal: String,
    pub attribute: String,
    pub utility: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeUtility {
    pub attribute: String,
    pub utility: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalReport {
    pub proposal: String,
    pub utility: i64,
    pub chosen: bool,
}

/// A persuader action on the wire. Missing keys mean empty lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionWire {
    #[serde(default)]
    pub motivational: Vec<String>,
    #[serde(default)]
    pub informational: Vec<CellRef>,
    #[serde(default)]
    pub inferential: Vec<String>,
    #[serde(default)]
    pub disclosures: Vec<CellUtility>,
}

/// A target reply on the wire. Echoed disclosures are listed under
/// `informational` ahead of the answers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplyWire {
    pub motivational: Vec<AttributeUtility>,
    pub informational: Vec<CellUtility>,
    pub inferential: Vec<ProposalReport>,
}

pub(crate) fn resolve_proposal(scenario: &Scenario, name: &str) -> Result<Proposal, ProtocolError> {
    scenario
        .proposal_names
        .iter()
        .position(|n| *n == name)
        .map(|i| Proposal::new(i).expect("three proposals"))
        .ok_or_else(|| ProtocolError::UnknownName(name.to_string()))
}

pub(crate) fn resolve_attribute(scenario: &Scenario, name: &str) -> Result<Attribute, ProtocolError> {
    scenario
        .attribute_names
        .iter()
        .position(|n| *n == name)
        .map(|i| Attribute::new(i).expect("attribute index in range"))
        .ok_or_else(|| ProtocolError::UnknownName(name.to_string()))
}

fn resolve_cell(scenario: &Scenario, proposal: &str, attribute: &str) -> Result<Cell, ProtocolError> {
    Ok(Cell::new(resolve_proposal(scenario, proposal)?, resolve_attribute(scenario, attribute)?))
}

impl ActionWire {
    pub fn from_action(action: &ActionMessage, scenario: &Scenario) -> Self {
        let cell_ref = |c: Cell| CellRef {
            proposal: scenario.proposal_name(c.proposal).to_string(),
            attribute: scenario.attribute_name(c.attribute).to_string(),
        };
        ActionWire {
            motivational: action.appeals.motivational.iter().map(|&a| scenario.attribute_name(a).to_string()).collect(),
            informational: action.appeals.informational.iter().map(cell_ref).collect(),
            inferential: action.appeals.inferential.iter().map(|&p| scenario.proposal_name(p).to_string()).collect(),
            disclosures: action
                .disclosures
                .iter()
                .map(|d| {
                    let r = cell_ref(d.cell);
                    CellUtility { proposal: r.proposal, attribute: r.attribute, utility: d.claimed_effect.value() as i64 }
                })
                .collect(),
        }
    }

    pub fn to_action(&self, scenario: &Scenario) -> Result<ActionMessage, ProtocolError> {
        let mut appeals = Appeals::default();
        for name in &self.motivational {
            appeals.motivational.insert(resolve_attribute(scenario, name)?);
        }
        for r in &self.informational {
            appeals.informational.insert(resolve_cell(scenario, &r.proposal, &r.attribute)?);
        }
        for name in &self.inferential {
            appeals.inferential.insert(resolve_proposal(scenario, name)?);
        }
        let mut disclosures = Vec::with_capacity(self.disclosures.len());
        for d in &self.disclosures {
            let cell = resolve_cell(scenario, &d.proposal, &d.attribute)?;
            let claimed_effect = Effect::from_value(d.utility).map_err(|_| ProtocolError::BadUtility(d.utility))?;
            disclosures.push(Disclosure { cell, claimed_effect });
        }
        Ok(ActionMessage::new(appeals, disclosures))
    }
}

/// Parse a structured persuader action. Code fences, single quotes and
/// trailing commas are tolerated.
pub fn parse_discrete_action(text: &str, scenario: &Scenario) -> Result<ActionMessage, ProtocolError> {
    let body = json::normalize(text, '{', '}')
        .ok_or_else(|| ProtocolError::MalformedAction("no JSON object found".into()))?;
    let wire: ActionWire =
        serde_json::from_str(&body).map_err(|e| ProtocolError::MalformedAction(e.to_string()))?;
    wire.to_action(scenario)
}

pub fn serialize_action(action: &ActionMessage, scenario: &Scenario) -> String {
    serde_json::to_string(&ActionWire::from_action(action, scenario)).expect("wire types serialize")
}

impl ReplyWire {
    pub fn from_reply(reply: &TargetReply, scenario: &Scenario) -> Self {
        let cell_utility = |c: Cell, e: Effect| CellUtility {
            proposal: scenario.proposal_name(c.proposal).to_string(),
            attribute: scenario.attribute_name(c.attribute).to_string(),
            utility: e.value() as i64,
        };
        let mut informational: Vec<CellUtility> =
            reply.echo.iter().map(|d| cell_utility(d.cell, d.claimed_effect)).collect();
        for a in &reply.informational_answers {
            if !reply.echo.iter().any(|d| d.cell == a.cell) {
                informational.push(cell_utility(a.cell, a.effect));
            }
        }
        ReplyWire {
            motivational: reply
                .motivational_answers
                .iter()
                .map(|m| AttributeUtility {
                    attribute: scenario.attribute_name(m.attribute).to_string(),
                    utility: m.weight as i64,
                })
                .collect(),
            informational,
            inferential: reply
                .inferential_answers
                .iter()
                .flat_map(|a| a.asked_utilities())
                .map(|u| ProposalReport {
                    proposal: scenario.proposal_name(u.proposal).to_string(),
                    utility: u.utility as i64,
                    chosen: u.chosen,
                })
                .collect(),
        }
    }
}

pub fn serialize_reply(reply: &TargetReply, scenario: &Scenario) -> String {
    serde_json::to_string(&ReplyWire::from_reply(reply, scenario)).expect("wire types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{worked_example, A_D};
    use crate::model::KnowledgeState;
    use crate::scenario;
    use crate::target::respond;

    fn abstract3() -> &'static Scenario {
        scenario::get("llm").unwrap()
    }

    #[test]
    fn single_motivational_appeal() {
        let sc = scenario::get("abstract2").unwrap();
        let a = parse_discrete_action(r#"{"motivational":["x"],"informational":[],"inferential":[],"disclosures":[]}"#, sc)
            .unwrap();
        assert_eq!(a.appeals.motivational.len(), 1);
        assert!(a.appeals.informational.is_empty() && a.disclosures.is_empty());
    }

    #[test]
    fn empty_lists_give_empty_action() {
        let a = parse_discrete_action(r#"{"motivational":[],"informational":[],"inferential":[],"disclosures":[]}"#, abstract3())
            .unwrap();
        assert!(a.is_empty());
        assert!(parse_discrete_action("{}", abstract3()).unwrap().is_empty());
    }

    #[test]
    fn out_of_range_utility() {
        let t = r#"{"disclosures":[{"proposal":"A","attribute":"public trust","utility":2}]}"#;
        assert_eq!(parse_discrete_action(t, abstract3()), Err(ProtocolError::BadUtility(2)));
    }

    #[test]
    fn abbreviations_rejected() {
        let t = r#"{"motivational":["trust"]}"#;
        assert!(matches!(parse_discrete_action(t, abstract3()), Err(ProtocolError::UnknownName(_))));
    }

    #[test]
    fn unknown_key_and_bad_syntax() {
        assert!(matches!(parse_discrete_action(r#"{"bribe":[]}"#, abstract3()), Err(ProtocolError::MalformedAction(_))));
        assert!(matches!(parse_discrete_action("no json", abstract3()), Err(ProtocolError::MalformedAction(_))));
    }

    #[test]
    fn fenced_python_style_accepted() {
        let t = "```\n{'inferential': ['A', 'B', 'C',],}\n```";
        assert_eq!(parse_discrete_action(t, abstract3()).unwrap().appeals.inferential.len(), 3);
    }

    #[test]
    fn echo_goes_under_informational() {
        let inst = worked_example();
        let action = ActionMessage::disclose(vec![Disclosure::truthful(&inst, A_D)]);
        let (_, reply) = respond(&KnowledgeState::initial(&inst), &inst, &action).unwrap();
        let wire = ReplyWire::from_reply(&reply, inst.scenario());
        assert_eq!(
            wire.informational,
            vec![CellUtility { proposal: "A".into(), attribute: "development speed".into(), utility: -1 }]
        );
        assert!(wire.motivational.is_empty() && wire.inferential.is_empty());
    }

    #[test]
    fn empty_reply_has_empty_lists() {
        let s = serialize_reply(&TargetReply::canned(), abstract3());
        assert_eq!(s, r#"{"motivational":[],"informational":[],"inferential":[]}"#);
    }
}
