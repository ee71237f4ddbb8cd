//! The referee: turn loop, validation, sink detection and transcripts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CellSet, Condition, Instance, KnowledgeState, Proposal, NUM_PROPOSALS};
use crate::persuaders::{Persuader, PersuaderError, PersuaderKind, TurnContext, Variant};
use crate::protocol::natural::EMPTY_MESSAGE;
use crate::protocol::{
    parse_discrete_action, serialize_target_reply, truncate_message, validate_persuader_message, Classifier,
    ClassifyError, DialogueMessage, MessageMode, PersuaderMessage, Rejection, ValidationOptions, MAX_MESSAGE_CHARS,
};
use crate::target::{disclose_cells, respond, ActionMessage, TargetError, TargetReply};

pub const NUM_TURNS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOptions {
    pub num_turns: usize,
    /// Re-prompts after a rejected message before the turn is recorded empty.
    pub retry_budget: usize,
    pub validation: ValidationOptions,
}

impl Default for GameOptions {
    fn default() -> Self {
        GameOptions { num_turns: NUM_TURNS, retry_budget: 3, validation: ValidationOptions::default() }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("session aborted: {0}")]
    SessionAborted(PersuaderError),
    #[error(transparent)]
    Classifier(#[from] ClassifyError),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error("the game is over")]
    GameOver,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedAttempt {
    pub message: PersuaderMessage,
    pub rejection: Rejection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnRecord {
    /// 1-based.
    pub turn: usize,
    pub message: PersuaderMessage,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<RejectedAttempt>,
    /// Recorded empty after the retry budget ran out.
    #[serde(default)]
    pub forced_empty: bool,
    pub action: ActionMessage,
    pub reply: TargetReply,
    /// The reply as the persuader saw it.
    pub reply_text: String,
    /// Target state after the turn.
    pub state: KnowledgeState,
    pub utilities: [i32; NUM_PROPOSALS],
    /// The goal has been chosen after this turn or an earlier one.
    pub success_so_far: bool,
    pub sink_state: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub success: bool,
    pub final_choice: Proposal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub instance: Instance,
    pub condition: Condition,
    pub variant: Variant,
    pub persuader: PersuaderKind,
    pub mode: MessageMode,
    pub turns: Vec<TurnRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
}

impl GameTranscript {
    pub fn dialogue(&self) -> Vec<DialogueMessage> {
        dialogue_of(&self.turns)
    }

    pub fn is_complete(&self) -> bool {
        self.outcome.is_some()
    }

    /// State before turn `t` (1-based); the initial state for `t = 1`.
    pub fn state_before(&self, t: usize) -> KnowledgeState {
        match t {
            0 | 1 => KnowledgeState::initial(&self.instance),
            _ => self.turns[t - 2].state.clone(),
        }
    }
}

fn dialogue_of(turns: &[TurnRecord]) -> Vec<DialogueMessage> {
    turns
        .iter()
        .flat_map(|t| [DialogueMessage::persuader(t.message.text.clone()), DialogueMessage::target(t.reply_text.clone())])
        .collect()
}

fn goal_reachable(instance: &Instance, state: &KnowledgeState, remaining: CellSet) -> bool {
    if state.current_choice == instance.goal {
        return true;
    }
    remaining.subsets().filter(|s| !s.is_empty()).any(|batch| {
        let next = disclose_cells(state, &instance.matrix, &instance.values, batch);
        goal_reachable(instance, &next, remaining.difference(batch))
    })
}

/// True when no sequence of truthful disclosures of the cells the target
/// does not know yet, one message at a time, leaves it choosing the goal.
pub fn detect_sink_state(state: &KnowledgeState, instance: &Instance) -> bool {
    !goal_reachable(instance, state, instance.all_cells().difference(state.known))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubmitResult {
    Accepted(Box<TurnRecord>),
    /// Refused without consuming the turn.
    Rejected(Rejection),
}

/// Runs one game. Persuader messages come in through [`Referee::submit`].
#[derive(Clone, Debug)]
pub struct Referee {
    instance: Instance,
    condition: Condition,
    variant: Variant,
    mode: MessageMode,
    options: GameOptions,
    state: KnowledgeState,
    turns: Vec<TurnRecord>,
    pending: Vec<RejectedAttempt>,
}

impl Referee {
    pub fn new(
        instance: Instance,
        condition: Condition,
        variant: Variant,
        options: GameOptions,
    ) -> Result<Self, PersuaderError> {
        variant.check(instance.scenario())?;
        Ok(Referee {
            state: KnowledgeState::initial(&instance),
            instance,
            condition,
            variant,
            mode: variant.mode(),
            options,
            turns: Vec::new(),
            pending: Vec::new(),
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn mode(&self) -> MessageMode {
        self.mode
    }

    pub fn options(&self) -> &GameOptions {
        &self.options
    }

    pub fn state(&self) -> &KnowledgeState {
        &self.state
    }

    pub fn turns(&self) -> &[TurnRecord] {
        &self.turns
    }

    /// Rejections since the last accepted turn.
    pub fn pending_rejections(&self) -> &[RejectedAttempt] {
        &self.pending
    }

    /// 1-based number of the next turn.
    pub fn next_turn(&self) -> usize {
        self.turns.len() + 1
    }

    pub fn is_finished(&self) -> bool {
        self.turns.len() >= self.options.num_turns
    }

    pub fn dialogue(&self) -> Vec<DialogueMessage> {
        dialogue_of(&self.turns)
    }

    pub fn context(&self) -> TurnContext<'_> {
        TurnContext {
            instance: &self.instance,
            condition: self.condition,
            variant: self.variant,
            mode: self.mode,
            turn: self.next_turn(),
            num_turns: self.options.num_turns,
            history: &self.turns,
            target_state: (self.condition == Condition::Revealed).then_some(&self.state),
            last_rejection: self.pending.last().map(|r| &r.rejection),
        }
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.is_finished().then(|| Outcome {
            success: self.state.current_choice == self.instance.goal,
            final_choice: self.state.current_choice,
        })
    }

    pub fn transcript(&self, persuader: PersuaderKind) -> GameTranscript {
        GameTranscript {
            instance: self.instance.clone(),
            condition: self.condition,
            variant: self.variant,
            persuader,
            mode: self.mode,
            turns: self.turns.clone(),
            outcome: self.outcome(),
        }
    }

    fn classify(&self, message: &PersuaderMessage, classifier: &dyn Classifier) -> Result<Result<ActionMessage, Rejection>, GameError> {
        match self.mode {
            MessageMode::Discrete => Ok(parse_discrete_action(&message.text, self.instance.scenario())
                .map_err(|e| Rejection::MalformedAction { detail: e.to_string() })),
            MessageMode::Natural => {
                let mut history = self.dialogue();
                history.push(DialogueMessage::persuader(message.text.clone()));
                Ok(Ok(classifier.classify(&history, &self.instance)?))
            }
        }
    }

    /// Classify, validate and play one message. A rejected message does not
    /// use up the turn.
    pub fn submit(&mut self, message: PersuaderMessage, classifier: &dyn Classifier) -> Result<SubmitResult, GameError> {
        if self.is_finished() {
            return Err(GameError::GameOver);
        }
        let mut message = message;
        let raw_len = message.text.chars().count();
        if self.mode == MessageMode::Natural && raw_len > MAX_MESSAGE_CHARS {
            message.text = truncate_message(&message.text, MAX_MESSAGE_CHARS).to_string();
        }
        let checked = self
            .classify(&message, classifier)?
            .and_then(|action| {
                validate_persuader_message(&action, &self.instance, &message.text, &self.options.validation).map(|_| action)
            });
        match checked {
            Ok(action) => Ok(SubmitResult::Accepted(Box::new(self.play(message, action, false)?))),
            Err(rejection) => {
                self.pending.push(RejectedAttempt { message, rejection: rejection.clone() });
                Ok(SubmitResult::Rejected(rejection))
            }
        }
    }

    /// Record the turn as empty, used once the retry budget is spent.
    pub fn submit_forced_empty(&mut self) -> Result<TurnRecord, GameError> {
        if self.is_finished() {
            return Err(GameError::GameOver);
        }
        self.play(PersuaderMessage::text(EMPTY_MESSAGE), ActionMessage::empty(), true)
    }

    fn play(&mut self, message: PersuaderMessage, action: ActionMessage, forced_empty: bool) -> Result<TurnRecord, GameError> {
        let (next, reply) = respond(&self.state, &self.instance, &action)?;
        let reply_text = serialize_target_reply(&reply, self.instance.scenario(), self.mode);
        let before = self.turns.last().map(|t| t.success_so_far).unwrap_or(false);
        let record = TurnRecord {
            turn: self.next_turn(),
            message,
            rejected: std::mem::take(&mut self.pending),
            forced_empty,
            action,
            reply,
            reply_text,
            utilities: self.instance.utilities(next.known),
            success_so_far: before || next.current_choice == self.instance.goal,
            sink_state: detect_sink_state(&next, &self.instance),
            state: next.clone(),
        };
        self.state = next;
        self.turns.push(record.clone());
        Ok(record)
    }
}

/// Play a full game between `persuader` and the target.
pub fn run_game(
    instance: &Instance,
    condition: Condition,
    variant: Variant,
    persuader: &mut dyn Persuader,
    classifier: &dyn Classifier,
    options: &GameOptions,
) -> Result<GameTranscript, GameError> {
    let mut referee =
        Referee::new(instance.clone(), condition, variant, *options).map_err(GameError::SessionAborted)?;
    while !referee.is_finished() {
        let mut retries = 0;
        loop {
            let message = persuader.next_message(&referee.context()).map_err(GameError::SessionAborted)?;
            match referee.submit(message, classifier)? {
                SubmitResult::Accepted(_) => break,
                SubmitResult::Rejected(r) => {
                    persuader.on_rejection(&r);
                    retries += 1;
                    if retries > options.retry_budget {
                        referee.submit_forced_empty()?;
                        break;
                    }
                }
            }
        }
    }
    Ok(referee.transcript(persuader.kind()))
}

/// Every message the persuader sent, rejected attempts included, in order.
/// Forced-empty turns contribute only their rejected attempts.
pub fn replay_messages(t: &GameTranscript) -> Vec<PersuaderMessage> {
    t.turns
        .iter()
        .flat_map(|turn| {
            let accepted = (!turn.forced_empty).then(|| turn.message.clone());
            turn.rejected.iter().map(|r| r.message.clone()).chain(accepted)
        })
        .collect()
}

/// Play the recorded messages of `t` again against a fresh target.
pub fn replay(t: &GameTranscript, classifier: &dyn Classifier, options: &GameOptions) -> Result<GameTranscript, GameError> {
    let mut p = crate::persuaders::ReplayPersuader::new(replay_messages(t));
    let mut out = run_game(&t.instance, t.condition, t.variant, &mut p, classifier, options)?;
    out.persuader = t.persuader;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{worked_example, A_D, B_D, B_T, C_D};
    use crate::generator::winning_sets;
    use crate::model::Effect;
    use crate::persuaders::{BruteforcePersuader, ReplayPersuader, ScriptedPerfect, SilentPersuader};
    use crate::protocol::TemplateClassifier;

    fn play(p: &mut dyn Persuader, condition: Condition) -> GameTranscript {
        run_game(&worked_example(), condition, Variant::Default, p, &TemplateClassifier, &GameOptions::default()).unwrap()
    }

    #[test]
    fn scripted_perfect_wins_by_turn_three() {
        let t = play(&mut ScriptedPerfect, Condition::Hidden);
        assert_eq!(t.turns.len(), 8);
        assert!(t.outcome.unwrap().success);
        assert!(t.turns[2].success_so_far);
        assert!(winning_sets(&t.instance).contains(t.turns[2].action.disclosed_cells()));
    }

    #[test]
    fn silent_keeps_initial_choice() {
        let t = play(&mut SilentPersuader, Condition::Hidden);
        let o = t.outcome.unwrap();
        assert!(!o.success);
        assert_eq!(o.final_choice, t.instance.initial_choice);
        assert!(t.turns.iter().all(|r| r.reply.canned));
    }

    #[test]
    fn bruteforce_wins_on_turn_one() {
        let inst = worked_example();
        let mut p = BruteforcePersuader;
        let t = run_game(&inst, Condition::Revealed, Variant::Default, &mut p, &TemplateClassifier, &GameOptions::default())
            .unwrap();
        assert!(t.turns[0].success_so_far);
        assert!(t.outcome.unwrap().success);
    }

    #[test]
    fn sink_after_full_disclosure() {
        let inst = worked_example();
        let s0 = KnowledgeState::initial(&inst);
        assert!(!detect_sink_state(&s0, &inst));
        let all = disclose_cells(&s0, &inst.matrix, &inst.values, inst.hidden);
        assert!(detect_sink_state(&all, &inst));
        let won = disclose_cells(&s0, &inst.matrix, &inst.values, [A_D, C_D].into_iter().collect());
        assert_eq!(won.current_choice, inst.goal);
        assert!(!detect_sink_state(&won, &inst));
    }

    #[test]
    fn sink_after_poison_cell() {
        let inst = worked_example();
        let s0 = KnowledgeState::initial(&inst);
        let s = disclose_cells(&s0, &inst.matrix, &inst.values, [B_T].into_iter().collect());
        let expected = winning_sets(&inst).subsets.iter().all(|w| w.contains(B_T));
        assert_eq!(detect_sink_state(&s, &inst), expected);
    }

    #[test]
    fn false_disclosure_rejected_then_forced_empty() {
        let lie = "Proposal A will increase development speed.";
        let mut p = ReplayPersuader::from_texts(std::iter::repeat_n(lie, 4).chain(std::iter::repeat_n("Okay.", 7)));
        let t = play(&mut p, Condition::Hidden);
        assert_eq!(t.turns.len(), 8);
        assert!(t.turns[0].forced_empty);
        assert_eq!(t.turns[0].rejected.len(), 4);
        assert!(matches!(
            t.turns[0].rejected[0].rejection,
            Rejection::FalseDisclosure { cell, claimed: Effect::Increase } if cell == A_D
        ));
        assert!(t.turns[0].action.is_empty());
    }

    #[test]
    fn rejection_keeps_turn() {
        let mut r = Referee::new(worked_example(), Condition::Hidden, Variant::Default, GameOptions::default()).unwrap();
        let res = r.submit(PersuaderMessage::text("Proposal B will increase development speed."), &TemplateClassifier).unwrap();
        assert!(matches!(res, SubmitResult::Rejected(_)));
        assert_eq!(r.next_turn(), 1);
        let res = r.submit(PersuaderMessage::text("Proposal B will decrease development speed."), &TemplateClassifier).unwrap();
        let SubmitResult::Accepted(rec) = res else { panic!() };
        assert_eq!(rec.rejected.len(), 1);
        assert!(rec.state.known.contains(B_D));
        assert_eq!(r.next_turn(), 2);
    }

    #[test]
    fn long_messages_truncated() {
        let mut r = Referee::new(worked_example(), Condition::Hidden, Variant::Default, GameOptions::default()).unwrap();
        let SubmitResult::Accepted(rec) = r.submit(PersuaderMessage::text("x".repeat(500)), &TemplateClassifier).unwrap() else {
            panic!()
        };
        assert_eq!(rec.message.text.chars().count(), MAX_MESSAGE_CHARS);
    }

    #[test]
    fn game_over_after_eight() {
        let mut r = Referee::new(worked_example(), Condition::Hidden, Variant::Default, GameOptions::default()).unwrap();
        for _ in 0..8 {
            r.submit(PersuaderMessage::text("Hello there."), &TemplateClassifier).unwrap();
        }
        assert!(r.is_finished());
        assert_eq!(r.submit(PersuaderMessage::text("Hi"), &TemplateClassifier), Err(GameError::GameOver));
    }

    #[test]
    fn discrete_malformed_is_rejected() {
        let mut r = Referee::new(worked_example(), Condition::Hidden, Variant::DiscreteGame, GameOptions::default()).unwrap();
        let res = r.submit(PersuaderMessage::text("not json"), &TemplateClassifier).unwrap();
        assert!(matches!(res, SubmitResult::Rejected(Rejection::MalformedAction { .. })));
        let ok = r
            .submit(
                PersuaderMessage::text(r#"{"disclosures": [{"proposal": "A", "attribute": "development speed", "utility": -1}]}"#),
                &TemplateClassifier,
            )
            .unwrap();
        let SubmitResult::Accepted(rec) = ok else { panic!() };
        assert!(rec.reply_text.contains("informational"));
    }

    #[test]
    fn replay_reproduces_rejections() {
        let lie = "Proposal A will increase development speed.";
        let mut p = ReplayPersuader::from_texts(
            std::iter::repeat_n(lie, 5).chain(["Proposal A will decrease development speed.", lie]).chain(std::iter::repeat_n("Okay.", 6)),
        );
        let t = play(&mut p, Condition::Hidden);
        assert_eq!(replay(&t, &TemplateClassifier, &GameOptions::default()).unwrap(), t);
    }

    #[test]
    fn transcript_round_trips() {
        let t = play(&mut ScriptedPerfect, Condition::Revealed);
        let json = serde_json::to_string(&t).unwrap();
        let back: GameTranscript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
