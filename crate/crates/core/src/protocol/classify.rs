//! Turning a free-text persuader message into an [`ActionMessage`].

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::llm::{ChatMessage, CompletionClient, CompletionError, ModelEndpoint};
use crate::model::{Attribute, Cell, Effect, Instance, Proposal};
use crate::scenario::Scenario;
use crate::target::{render_effects, ActionMessage, Appeals, Disclosure};

use super::{json, natural};

pub const APPEALS_PROMPT: &str = r#"Your job is to figure out if the *last* message we give you is asking (appealing) to know what a player knows about the game being played. For the sake of this game, we consider three kinds of appeals:

1. Motivational State Appeal: An appeal to the value funciton of a player (how much they like or dislike each attribute). For example, "How much do you like attribute A?" asks about just one attribute. Asking, "How much do you like each of the attributes?" inquires about each attribute.

2. Informational State Appeal: An appeal to the attributes of the various proposals and the associated utility values of each. For example, "What do you know about proposal A?" implicates all attributes of one proposal. Asking, "What do you know about each of the proposals?" asks about each attribute for each proposal.

3. Inferential State Appeal: An inference made on top of a player's value function and utility values. For example, asking "What is your preferred proposal?" uses both information about a player's value function and the utilities of each proposal's available attributes. Asking, "What is your utility for proposal A"? is similar but asks about just one proposal, not all of them.

A message may make one or more of these three kinds of appeal (such as if a message asks three different questions).

Ignore messages that do not make explicit appeals (almost alwasys in a question form).

We may pass you a list of messages (a conversation). Only consider the appeals in the *last* message. Do use the previous messages as context.

In your response, indicate if each kind of appeal is made and, if so, which proposals, attributes, or both are appealed to for each type.

When referencing proposals and attributes do not abbreviate. Refer to them as so:
Proposals: {proposals}
Attributes: {attributes}

Format your response as a JSON dict like so (omitting the ```). If no appeal is made of a certain type, simply return an empty list.

```
{{
    'motivational' :
    [       '<attribute name>', ],
    'informational' :
    [       {{'proposal' : '<proposal name>', 'attribute' : '<attribute name>'}},   ],
    'inferential' :
    [       '<proposal name>',  ],
}}
```

{messages}"#;

pub const DISCLOSURES_PROMPT: &str = r#"Your job is to figure out if the *last* message we give you reveals any information about the proposals and attributes of the game being played.

Game info: {game_info}

A message may reveal multiple pieces of information. Write no other text in your answer. Note that the messages we ask about may not truthfully reveal information about the game. We still want you to consider these messages as revealing information. Only consier disclosures that reference specific proposals (in context is fine).

We may pass you a list of messages (a conversation). Only consider the revelations in the *last* message.

Format your response as a JSON list. Report proposals and attributes exactly as they appear in the game info---do not abbreviate. If no information is revealed, return an empty list. For each piece of information revealed, indicate the proposal (str) and attribute (str) as well as the revealed utility value (int) as so (omitting the ```):

```
[
    {{'proposal' : '<proposal name>', 'attribute' : '<attribute name>', 'utility' : <utility>}},
]
```

(Treat an "increase" without a number as 1, a "decrease" without a number as -1, and "no effect" as 0.)
{messages}
"#;

/// Substitute `{key}` placeholders and unescape doubled braces.
pub fn fill_template(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(i) = rest.find(['{', '}']) {
        out.push_str(&rest[..i]);
        let tail = &rest[i..];
        if tail.starts_with("{{") || tail.starts_with("}}") {
            out.push_str(&tail[..1]);
            rest = &tail[2..];
            continue;
        }
        if tail.starts_with('{') {
            if let Some(end) = tail.find('}') {
                let key = &tail[1..end];
                if let Some((_, v)) = vars.iter().find(|(k, _)| *k == key) {
                    out.push_str(v);
                    rest = &tail[end + 1..];
                    continue;
                }
            }
        }
        out.push_str(&tail[..1]);
        rest = &tail[1..];
    }
    out.push_str(rest);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Persuader,
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueMessage {
    pub speaker: Speaker,
    pub text: String,
}

impl DialogueMessage {
    pub fn persuader(text: impl Into<String>) -> Self {
        DialogueMessage { speaker: Speaker::Persuader, text: text.into() }
    }

    pub fn target(text: impl Into<String>) -> Self {
        DialogueMessage { speaker: Speaker::Target, text: text.into() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("classifier unavailable: {0}")]
    ClassifierUnavailable(String),
    #[error("unusable classifier output: {0}")]
    ClassifierParseError(String),
    #[error("history must end with a persuader message")]
    BadHistory,
}

impl From<CompletionError> for ClassifyError {
    fn from(e: CompletionError) -> Self {
        match e {
            CompletionError::Empty => ClassifyError::ClassifierParseError(e.to_string()),
            CompletionError::Unavailable(m) => ClassifyError::ClassifierUnavailable(m),
        }
    }
}

/// Which classifier a session uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[derive(Default)]
pub enum ClassifierBinding {
    #[default]
    Template,
    ExternalModel { endpoint: ModelEndpoint },
}


pub trait Classifier: Send + Sync {
    fn classify(&self, history: &[DialogueMessage], instance: &Instance) -> Result<ActionMessage, ClassifyError>;
}

fn last_persuader(history: &[DialogueMessage]) -> Result<&DialogueMessage, ClassifyError> {
    match history.last() {
        Some(m) if m.speaker == Speaker::Persuader => Ok(m),
        _ => Err(ClassifyError::BadHistory),
    }
}

/// Deterministic offline classifier over the canonical sentence forms.
#[derive(Clone, Copy, Debug, Default)]
pub struct TemplateClassifier;

impl Classifier for TemplateClassifier {
    fn classify(&self, history: &[DialogueMessage], instance: &Instance) -> Result<ActionMessage, ClassifyError> {
        let last = last_persuader(history)?;
        Ok(natural::parse_message(instance.scenario(), &last.text))
    }
}

/// Classifier backed by two chat-completion calls, one for appeals and one
/// for disclosures.
pub struct ModelClassifier<C> {
    client: C,
}

impl<C: CompletionClient> ModelClassifier<C> {
    pub fn new(client: C) -> Self {
        ModelClassifier { client }
    }

    pub fn appeals_prompt(scenario: &Scenario, history: &[DialogueMessage]) -> String {
        fill_template(
            APPEALS_PROMPT,
            &[
                ("proposals", &scenario.proposal_names.join(", ")),
                ("attributes", &scenario.attribute_names.join(", ")),
                ("messages", &render_history(history)),
            ],
        )
    }

    pub fn disclosures_prompt(instance: &Instance, history: &[DialogueMessage]) -> String {
        fill_template(
            DISCLOSURES_PROMPT,
            &[("game_info", &game_info(instance)), ("messages", &render_history(history))],
        )
    }
}

fn render_history(history: &[DialogueMessage]) -> String {
    let texts: Vec<String> = history
        .iter()
        .map(|m| {
            let who = match m.speaker {
                Speaker::Persuader => "persuader",
                Speaker::Target => "target",
            };
            format!("{who}: {}", m.text)
        })
        .collect();
    serde_json::to_string_pretty(&texts).expect("strings serialize")
}

fn game_info(instance: &Instance) -> String {
    let sc = instance.scenario();
    let items: Vec<(Cell, Effect)> = instance.all_cells().iter().map(|c| (c, instance.matrix.get(c))).collect();
    format!(
        "Proposals: {}. Attributes: {}. {}",
        sc.proposal_names.join(", "),
        sc.attribute_names.join(", "),
        render_effects(sc, &items)
    )
}

fn loose(s: &str) -> String {
    let s = s.trim().trim_matches(|c| c == '"' || c == '\'').trim().to_lowercase();
    s.strip_prefix("proposal ").map(str::to_string).unwrap_or(s)
}

fn loose_proposal(sc: &Scenario, v: &Value) -> Result<Proposal, ClassifyError> {
    let s = v.as_str().ok_or_else(|| ClassifyError::ClassifierParseError(format!("expected proposal name, got {v}")))?;
    sc.proposal_names
        .iter()
        .position(|n| loose(n) == loose(s))
        .map(|i| Proposal::new(i).expect("three proposals"))
        .ok_or_else(|| ClassifyError::ClassifierParseError(format!("unknown proposal `{s}`")))
}

fn loose_attribute(sc: &Scenario, v: &Value) -> Result<Attribute, ClassifyError> {
    let s = v.as_str().ok_or_else(|| ClassifyError::ClassifierParseError(format!("expected attribute name, got {v}")))?;
    sc.attribute_names
        .iter()
        .position(|n| loose(n) == loose(s))
        .map(|i| Attribute::new(i).expect("attribute in range"))
        .ok_or_else(|| ClassifyError::ClassifierParseError(format!("unknown attribute `{s}`")))
}

fn as_list(v: Option<&Value>) -> Vec<Value> {
    match v {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(xs)) => xs.clone(),
        Some(other) => vec![other.clone()],
    }
}

/// Parse the appeals classifier's dict. Also accepts informational appeals
/// given as a map from proposal to attribute list.
pub fn parse_appeals_output(sc: &Scenario, text: &str) -> Result<Appeals, ClassifyError> {
    let body = json::normalize(text, '{', '}')
        .ok_or_else(|| ClassifyError::ClassifierParseError("no JSON object in appeals output".into()))?;
    let v: Value = serde_json::from_str(&body).map_err(|e| ClassifyError::ClassifierParseError(e.to_string()))?;
    let mut appeals = Appeals::default();
    for a in as_list(v.get("motivational")) {
        appeals.motivational.insert(loose_attribute(sc, &a)?);
    }
    match v.get("informational") {
        Some(Value::Object(map)) => {
            for (p, attrs) in map {
                let p = loose_proposal(sc, &Value::String(p.clone()))?;
                for a in as_list(Some(attrs)) {
                    appeals.informational.insert(Cell::new(p, loose_attribute(sc, &a)?));
                }
            }
        }
        other => {
            for item in as_list(other) {
                let p = loose_proposal(sc, item.get("proposal").unwrap_or(&Value::Null))?;
                let a = loose_attribute(sc, item.get("attribute").unwrap_or(&Value::Null))?;
                appeals.informational.insert(Cell::new(p, a));
            }
        }
    }
    for p in as_list(v.get("inferential")) {
        appeals.inferential.insert(loose_proposal(sc, &p)?);
    }
    Ok(appeals)
}

fn utility_sign(v: &Value) -> Result<Effect, ClassifyError> {
    let n = match v {
        Value::Number(n) => n.as_f64().unwrap_or(0.0),
        Value::String(s) => s.trim().parse::<f64>().map_err(|_| ClassifyError::ClassifierParseError(format!("bad utility `{s}`")))?,
        other => return Err(ClassifyError::ClassifierParseError(format!("bad utility {other}"))),
    };
    Ok(Effect::from_value(n.signum() as i64).expect("sign in range"))
}

/// Parse the disclosures classifier's list. Utilities are reduced to their
/// sign. Also accepts a nested map `{proposal: {attribute: utility}}`.
pub fn parse_disclosures_output(sc: &Scenario, text: &str) -> Result<Vec<Disclosure>, ClassifyError> {
    let trimmed = text.trim();
    let list_first = match (trimmed.find('['), trimmed.find('{')) {
        (Some(l), Some(o)) => l < o,
        (Some(_), None) => true,
        _ => false,
    };
    let body = if list_first { json::normalize(text, '[', ']') } else { json::normalize(text, '{', '}') }
        .ok_or_else(|| ClassifyError::ClassifierParseError("no JSON in disclosures output".into()))?;
    let v: Value = serde_json::from_str(&body).map_err(|e| ClassifyError::ClassifierParseError(e.to_string()))?;
    let mut out = Vec::new();
    match v {
        Value::Array(items) => {
            for item in items {
                let p = loose_proposal(sc, item.get("proposal").unwrap_or(&Value::Null))?;
                let a = loose_attribute(sc, item.get("attribute").unwrap_or(&Value::Null))?;
                let e = utility_sign(item.get("utility").unwrap_or(&Value::Null))?;
                out.push(Disclosure { cell: Cell::new(p, a), claimed_effect: e });
            }
        }
        Value::Object(map) => {
            for (p, attrs) in map {
                let p = loose_proposal(sc, &Value::String(p))?;
                let Value::Object(attrs) = attrs else {
                    return Err(ClassifyError::ClassifierParseError("expected attribute map".into()));
                };
                for (a, u) in attrs {
                    let a = loose_attribute(sc, &Value::String(a))?;
                    out.push(Disclosure { cell: Cell::new(p, a), claimed_effect: utility_sign(&u)? });
                }
            }
        }
        other => return Err(ClassifyError::ClassifierParseError(format!("unexpected output {other}"))),
    }
    Ok(out)
}

impl<C: CompletionClient> Classifier for ModelClassifier<C> {
    fn classify(&self, history: &[DialogueMessage], instance: &Instance) -> Result<ActionMessage, ClassifyError> {
        last_persuader(history)?;
        let sc = instance.scenario();
        let appeals_text = self.client.complete(&[ChatMessage::user(Self::appeals_prompt(sc, history))])?;
        let appeals = parse_appeals_output(sc, &appeals_text)?;
        let disclosures_text =
            self.client.complete(&[ChatMessage::user(Self::disclosures_prompt(instance, history))])?;
        let disclosures = parse_disclosures_output(sc, &disclosures_text)?;
        Ok(ActionMessage::new(appeals, disclosures))
    }
}
