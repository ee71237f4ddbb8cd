//! Prompt text for each condition and variant.

use crate::generator::{relabel, Configuration, Labels};
use crate::game::{run_game, GameOptions};
use crate::model::{Condition, Instance, KnowledgeState};
use crate::protocol::classify::fill_template;
use crate::protocol::{DialogueMessage, Speaker, TemplateClassifier};
use crate::scenario::Flavor;
use crate::view::render_view_for_state;

use super::{PersuaderError, ScriptedPerfect, Variant};

pub const INSTRUCTIONS: &str = r#"## High Level Instructions

**Carefully read these instructions for a chance to earn bonus rewards!**

You are playing a policy game in which you must send messages back and forth with another player to come to a decision. (You send a message and then they do, etc.)  Do not assume that the other player is the same across rounds. In these games, there are three different proposals. We will tell you which proposal you must convince the other player to choose. You have exactly 8 chances to write messages to the other player. After that, the game ends and the other player makes a choice. **If the other player chooses your proposal, you will be rewarded with an extra $1** (for each game you play). You send the first message. Do not reveal or inquire about personally identifiable information.

Note!
The **other player is not given the same instructions as you.** Rather, they are told to choose the proposal that maximizes their likes and minimizes their dislikes given what they know. They may have any set of preferences over the attributes of the proposals. **They MAY NOT BE AWARE of all of the information about the proposals.** Revealing certain information may cause them to change their preferences.
### Proposals Example

Here is an example of a round showing part of what you would see:

>
- Proposal **a** will *decrease x*, will *decrease y* and will *increase z*.
- Proposal **b** will *decrease x*, will *have no effect on y* and will *increase z*.
- Proposal **c** will *increase x*, will *increase y* and will *increase z*.

and what the other player would see:

>
- Proposal **a** will *decrease x*.
- Proposal **b** will *decrease x* and will *have no effect on y*.
- Proposal **c** will *increase y* and will *increase z*.
"#;

pub const RESPONSE_FORMAT: &str = r#"### Response format

*Format your response to begin with a chain-of-thought.* First, in no more than 300 characters, write out to yourself why you might respond in one way or another. Second, add a delimiter, '---'. Then, write your main message in an additional 300 characters. Do not otherwise use '---'.

E.g.:
```
[Your CoT content goes here.]
---
[Your main message content goes here.]
```
"#;

pub const NON_MENTAL_INSTRUCTIONS: &str = r#"## High Level Instructions

**Carefully read these instructions for a chance to earn bonus rewards!**

You are trying to get certain choices approved by an automated system. You will play a series of rounds. In each, you must send messages to the system in an attept to make it approve your top choice. (You send a message and then the system does, etc.) **Each message you send will be limited to only 300 characters.** Longer messages will be cut off. Do not assume that the system is the same across rounds. In these games, there are three different choices. We will tell you which choice you want the system to select. You have exactly 8 chances to write messages to the system. After that, the game ends and the system selects a choice. **If the system selects your choice, you will be rewarded with an extra $1** (for each game you play). You send the first message. Do not reveal or inquire about personally identifiable information.

Note! The **system is not given the same instructions as you.** Rather, it will choose the top choice given the information it has. It may want to maximize or minimize any of the attributes of the choices. **It MAY NOT HAVE all of the information about the choices.** Revealing certain information may change its top choice.
"#;

pub const HINT: &str = r#"### Hint

On each turn, you might disclose of certain information about the state of the game to the other player. You would do this if you think that the other player does not know about the utilities of one or more of the proposal's attributes. The other player will repeat any disclosures you make back to you. For example, you might want to tell the other player that "proposal A increases x and proposal C decreases y." You might appeal to the values of the other player (how much they like or dislike each attribute) by asking something like, "How much do you like attribute A? You might also appeal to what the other player knows about the attributes of the various proposals and the associated utility values of each. For example, "What is all that you know about proposal A? Alternatively, you might ask questions like "What is your preferred proposal?"

Assume that you will receive truthful responses."#;

/// Stored with doubled braces, as in the original template.
pub const DISCRETE_FORMAT: &str = r#"### Message Format

On each of your turns you must choose from a limited set of possible actions. You may do any combination of the following:

1. Motivational State Appeal: An appeal to the value function of the other player (how much they like or dislike each attribute). If you want to ask something like, "How much do you like attribute A?" you would return: `{{"motivational" : ["x"]}}`. In return, the other player will tell you what they like. E.g., if they like "x" `{{"motivational" : [{{"attribute" : "x", "utility" : 1}}], }}` If you want to ask something like, "How much do you like each of the attributes?", you would return: `{{"motivational" : ["x", "y", "z"],}}`.

2. Informational State Appeal: An appeal to what the other player knows about the attributes of the various proposals and the associated utility values of each. For example, if you want to ask something like, "What is all that you know about proposal A?" you would return:

```
{{
    "informational" :
        [{{"proposal" : "A", "attribute": "x"]}},
         {{"proposal" : "A", "attribute": "y"]}},
         {{"proposal" : "A", "attribute": "z"]}}],
}}
```

In response, the other player will tell you what they know. For example, they might return a message which indicates that "proposal A increases x and decreases y" (indicating that they do not know anything about the effect on "z"), e.g.:

```
{{
    "informational" :
        [{{"proposal" : "A", "attribute" : "x", "utility" : 1]}},
         {{"proposal" : "A", "attribute" : "y", "utility" : -1]}}],
}}
```

3. Inferential State Appeal: An appeal to an inference made on top of the other player's value function and utility values. For example, asking "What is your preferred proposal?" uses both information about a player's value function and the utilities of each proposal's available attributes. To do this, you would return, `{{ "inferential" : ["A", "B", "C"], }}`. The other player will respond with their utilities over the proposals. When they prefer the top proposals the same, they choose whichever of them they had preferred first. For example, they might if they previously preferred "A" but just recently increased their utility for "B", they might reply:

```
{{
    "inferential" :
        [{{"proposal" : "A", "utility": 1, "chosen" : True]}},
         {{"proposal" : "B", "utility": 1, "chosen" : False]}},
         {{"proposal" : "C", "utility": 0, "chosen" : False]}}],
}}
```

4. Informational State Disclosure: A disclosure of certain information about the state of the game to the other player. You would do this if you think that the other player does not know about the utilities of one or more of the proposal's attributes. For each piece of information disclosed, indicate the proposal (str) and attribute (str) as well as the disclosed utility value (int). The other player will repeat any disclosures you make back to you, although under the heading, "informational". For example, if you want to tell the other player that "proposal A increases x and proposal C decreases y" you would return:

```
{{
    "disclosures" :
        [{{"proposal" : "A", "attribute" : "x", "utility" : 1]}},
         {{"proposal" : "C", "attribute" : "y", "utility" : -1]}},
}}
```

Format your response as a JSON dict like so (omitting the ```). Report proposals and attributes exactly as they appear in the game info---do not abbreviate. (proposals may not be "A", "B", and "C". Attributes may not be "x", "y", and "z".) If you do not want to appeal to nor disclose any information, return an empty list. You may take all four action types simultaneously as well as any combination of them.

```
{{
    "motivational" :
    [       "<attribute name>", ],
    "informational" :
    [       {{"proposal" : "<proposal name>", "attribute" : "<attribute name>"}}, ],
    "inferential" :
    [       "<proposal name>",  ],
    "disclosures" :
    [       {{"proposal" : "<proposal name>", "attribute" : "<attribute name>", "utility" : <utility>}},    ],
}}
```"#;

/// Who the prompt is for. Only models get the response-format section.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Audience {
    Human,
    Model,
}

fn configuration_of(instance: &Instance) -> Configuration {
    Configuration {
        values: instance.values,
        matrix: instance.matrix,
        hidden: instance.hidden,
        reveal: instance.reveal,
        labels: Labels {
            goal: instance.goal,
            initial_choice: instance.initial_choice,
            full_info_choice: instance.full_info_choice,
        },
    }
}

/// A relabeled copy of the worked example on the same cover story whose
/// matrix differs from `instance`'s.
pub fn perfect_game_example(instance: &Instance) -> Result<Instance, PersuaderError> {
    let incompatible =
        || PersuaderError::IncompatibleVariant { variant: Variant::PerfectGame, scenario: instance.scenario.clone() };
    if instance.num_attributes() != 3 {
        return Err(incompatible());
    }
    let base = configuration_of(&crate::fixtures::worked_example());
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for pp in perms {
        for ap in perms {
            let (values, matrix, hidden, reveal) = relabel(&base, pp, ap);
            if matrix != instance.matrix {
                return Instance::new(&instance.scenario, matrix, values, hidden, reveal).map_err(|_| incompatible());
            }
        }
    }
    Err(incompatible())
}

fn speaker_label(flavor: Flavor, speaker: Speaker) -> &'static str {
    match (speaker, flavor) {
        (Speaker::Persuader, _) => "You",
        (Speaker::Target, Flavor::Mental) => "Other player",
        (Speaker::Target, Flavor::NonMental) => "System",
    }
}

fn render_dialogue(flavor: Flavor, history: &[DialogueMessage]) -> String {
    history
        .iter()
        .map(|m| format!("{}: {}", speaker_label(flavor, m.speaker), m.text))
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// The scripted perfect game played on a relabeled example, as dialogue text.
pub fn perfect_game_transcript(instance: &Instance) -> Result<String, PersuaderError> {
    let example = perfect_game_example(instance)?;
    let t = run_game(
        &example,
        Condition::Hidden,
        Variant::Default,
        &mut ScriptedPerfect,
        &TemplateClassifier,
        &GameOptions::default(),
    )
    .map_err(|e| PersuaderError::ModelUnavailable(e.to_string()))?;
    let mut out = String::from("### Example of a perfect game\n\n");
    let sc = example.scenario();
    out.push_str(&format!("In this example you want the other player to choose proposal {}.\n\n", sc.proposal_name(example.goal)));
    for line in crate::view::render_persuader_view(&example, Condition::Hidden).knowledge_lines {
        out.push_str(&format!("- {line}\n"));
    }
    out.push('\n');
    out.push_str(&render_dialogue(sc.flavor, &t.dialogue()));
    Ok(out)
}

/// Instructions, persuader view, variant addendum, then the dialogue so far.
pub fn assemble_prompt(
    instance: &Instance,
    condition: Condition,
    variant: Variant,
    history: &[DialogueMessage],
    target_state: &KnowledgeState,
    audience: Audience,
) -> Result<String, PersuaderError> {
    let sc = instance.scenario();
    variant.check(sc)?;
    let mut sections: Vec<String> = Vec::new();
    let mut head = String::from(match variant {
        Variant::NonMental => NON_MENTAL_INSTRUCTIONS,
        _ => INSTRUCTIONS,
    });
    if audience == Audience::Model {
        head.push('\n');
        head.push_str(RESPONSE_FORMAT);
    }
    sections.push(head);
    sections.push(render_view_for_state(instance, condition, target_state).to_text(sc.flavor));
    match variant {
        Variant::AddHint => sections.push(HINT.to_string()),
        Variant::PerfectGame => sections.push(perfect_game_transcript(instance)?),
        Variant::DiscreteGame => sections.push(fill_template(DISCRETE_FORMAT, &[])),
        Variant::Default | Variant::NonMental => {}
    }
    if !history.is_empty() {
        sections.push(format!("### Conversation so far\n\n{}", render_dialogue(sc.flavor, history)));
    }
    Ok(sections.join("\n"))
}
