//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p mindgames-core --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use mindgames_core::fixtures::worked_example;
use mindgames_core::game::{replay, run_game, GameOptions, GameTranscript};
use mindgames_core::generator::{
    check_conditions, count_configurations, critical_pool, sample_from_pool, winning_sets, Configuration, GeneratorParams,
};
use mindgames_core::llm::{CompletionClient, ScriptedClient};
use mindgames_core::metrics::{exact_baseline_rate, game_features, monte_carlo_baseline};
use mindgames_core::model::{
    Cell, CellSet, Condition, Instance, KnowledgeState, Proposal, UtilityMatrix, ValueFunction,
};
use mindgames_core::persuaders::{
    BruteforcePersuader, DrawSchedule, ModelPersuader, Persuader, RandomBaseline, ReplayPersuader, ScriptedPerfect,
    SilentPersuader, Variant,
};
use mindgames_core::protocol::TemplateClassifier;
use mindgames_core::stats::{analytic_win_probability, best_draw_count, expanded_win_probability};
use mindgames_core::target::disclose_cells;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const BASELINE: f64 = 0.0752;
const ANALYTIC_TOL: f64 = 5e-4;
const IDENTITY_TOL: f64 = 1e-12;
const MONTE_CARLO_TOL: f64 = 0.01;
const MONTE_CARLO_TRIALS: u64 = 50_000;
const MONTE_CARLO_INSTANCES: usize = 50;
const MONTE_CARLO_BUDGET: Duration = Duration::from_secs(120);
const ENUMERATION_BUDGET: Duration = Duration::from_secs(300);
const MIN_ENUMERATED: usize = 10_000;
const TWO_ATTRIBUTE_COUNT: usize = 56;
const SAMPLED: usize = 100;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn pool() -> &'static [Configuration] {
    static POOL: std::sync::OnceLock<Vec<Configuration>> = std::sync::OnceLock::new();
    POOL.get_or_init(|| critical_pool(&GeneratorParams::default()).expect("default parameters are valid"))
}

fn sample(count: usize, seed: u64) -> Vec<Instance> {
    let params = GeneratorParams { sample_count: count, seed, ..Default::default() };
    sample_from_pool(pool(), &params).expect("pool is large enough")
}

fn play(inst: &Instance, condition: Condition, variant: Variant, p: &mut dyn Persuader) -> GameTranscript {
    run_game(inst, condition, variant, p, &TemplateClassifier, &GameOptions::default()).expect("game runs")
}

fn play_texts(inst: &Instance, texts: &[&str]) -> GameTranscript {
    let padded = texts.iter().copied().chain(std::iter::repeat_n("Okay.", 8 - texts.len()));
    play(inst, Condition::Hidden, Variant::Default, &mut ReplayPersuader::from_texts(padded))
}

fn analytic_baseline() -> Outcome {
    let p6 = analytic_win_probability::<f64>(6).total;
    ensure((p6 - BASELINE).abs() <= ANALYTIC_TOL, format!("p(6) = {p6:.6}"))?;
    let (n, _) = best_draw_count::<f64>(50);
    ensure(n == 6, format!("argmax n = {n}"))?;
    let worst = (0..=50)
        .map(|n| (analytic_win_probability::<f64>(n).total - expanded_win_probability::<f64>(n)).abs())
        .fold(0.0, f64::max);
    ensure(worst <= IDENTITY_TOL, format!("identity gap {worst:e}"))?;
    Ok(format!("p(6) = {p6:.6}, argmax n = 6, max identity gap {worst:.1e}"))
}

fn monte_carlo() -> Outcome {
    let instances = sample(MONTE_CARLO_INSTANCES, 1);
    let start = Instant::now();
    let est = monte_carlo_baseline(&instances, 6, MONTE_CARLO_TRIALS, 2026, DrawSchedule::SingleMessage);
    let elapsed = start.elapsed();
    let exact = exact_baseline_rate(&instances, 6, DrawSchedule::SingleMessage);
    let round_robin = exact_baseline_rate(&instances, 6, DrawSchedule::RoundRobin);
    let detail = format!(
        "rate {:.4} [{:.4}, {:.4}] over {} games on {} instances in {:.1}s; exact {:.4}; one draw per turn would give {:.4}",
        est.rate.mean,
        est.rate.lower,
        est.rate.upper,
        est.trials,
        instances.len(),
        elapsed.as_secs_f64(),
        exact,
        round_robin
    );
    ensure((est.rate.mean - BASELINE).abs() <= MONTE_CARLO_TOL, detail.clone())?;
    ensure(elapsed <= MONTE_CARLO_BUDGET, detail.clone())?;
    Ok(detail)
}

fn generator_soundness() -> Outcome {
    let instances = sample(SAMPLED, 7);
    for inst in &instances {
        let id = &inst.id;
        ensure(check_conditions(&inst.values, &inst.matrix, inst.hidden, inst.reveal), format!("{id}: conditions"))?;
        ensure(inst.hidden.len() == 4 && inst.reveal.len() == 2, format!("{id}: |H|, |R|"))?;
        let wins = winning_sets(inst);
        ensure(wins.contains(inst.reveal), format!("{id}: R does not win"))?;
        let all = disclose_cells(&KnowledgeState::initial(inst), &inst.matrix, &inst.values, inst.hidden);
        ensure(all.current_choice != inst.goal, format!("{id}: disclosing everything wins"))?;
        ensure(all.current_choice == inst.full_info_choice, format!("{id}: full-information label"))?;
        let own = CellSet::of_proposal(inst.goal, inst.num_attributes());
        ensure(!wins.subsets.iter().any(|s| s.is_subset(own)), format!("{id}: goal-only subset wins"))?;
    }
    Ok(format!("{} sampled instances", instances.len()))
}

fn enumeration_counts() -> Outcome {
    let start = Instant::now();
    let three = pool().len();
    let counts = count_configurations(2).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let conventions = counts.conventions();
    let listed: Vec<String> = conventions.iter().map(|(name, n)| format!("{name}={n}")).collect();
    let detail = format!(
        "3-attribute critical instances {three}; 2-attribute counts {} ({:.1}s)",
        listed.join(", "),
        elapsed.as_secs_f64()
    );
    ensure(three >= MIN_ENUMERATED, detail.clone())?;
    ensure(elapsed <= ENUMERATION_BUDGET, detail.clone())?;
    ensure(conventions.iter().any(|(_, n)| *n == TWO_ATTRIBUTE_COUNT), format!("no convention gives 56: {detail}"))?;
    Ok(detail)
}

fn worked_example_trace() -> Outcome {
    let inst = worked_example();
    let t = play_texts(
        &inst,
        &[
            "Proposal A will decrease development speed. Proposal C will increase development speed.",
            "Proposal B will decrease development speed and will increase public trust.",
        ],
    );
    let start = inst.utilities(inst.initially_known());
    let trace = [
        (start, inst.initial_choice),
        (t.turns[0].utilities, t.turns[0].state.current_choice),
        (t.turns[1].utilities, t.turns[1].state.current_choice),
    ];
    let want = [([0, 0, 1], 2), ([1, 0, 0], 0), ([1, 2, 0], 1)];
    for (i, ((u, c), (wu, wc))) in trace.iter().zip(want).enumerate() {
        ensure(*u == wu && c.index() == wc, format!("step {i}: {u:?} {c}"))?;
    }
    Ok("(0,0,1) C -> (1,0,0) A -> (1,2,0) B".into())
}

fn optimal_agents() -> Outcome {
    let instances = sample(SAMPLED, 11);
    let mut brute = 0;
    let mut scripted = 0;
    for inst in &instances {
        let t = play(inst, Condition::Revealed, Variant::Default, &mut BruteforcePersuader);
        if t.turns[0].success_so_far && t.outcome.is_some_and(|o| o.success) {
            brute += 1;
        }
        let t = play(inst, Condition::Hidden, Variant::Default, &mut ScriptedPerfect);
        if t.turns[2].success_so_far && t.outcome.is_some_and(|o| o.success) {
            scripted += 1;
        }
    }
    let detail = format!("planner {brute}/{SAMPLED} on turn 1 (revealed); script {scripted}/{SAMPLED} by turn 3 (hidden)");
    ensure(brute == SAMPLED && scripted == SAMPLED, detail.clone())?;
    Ok(detail)
}

/// The hidden-condition human dialogue on the LLM cover story: the target
/// dislikes everything, and ties keep B because B was preferred first.
fn human_dialogue_instance() -> Instance {
    let matrix = UtilityMatrix::from_values(&[vec![0, 1, -1], vec![-1, 1, 1], vec![1, -1, 1]]).unwrap();
    let values = ValueFunction::new(&[-1, -1, -1]).unwrap();
    let hidden: CellSet = [Cell::at(0, 2), Cell::at(1, 1), Cell::at(1, 2)].into_iter().collect();
    Instance {
        id: "human-hidden-dialogue".into(),
        scenario: "llm".into(),
        matrix,
        values,
        hidden,
        reveal: CellSet::EMPTY,
        goal: Proposal::ALL[0],
        initial_choice: Proposal::ALL[1],
        full_info_choice: Proposal::ALL[0],
    }
}

fn tie_breaking() -> Outcome {
    let inst = human_dialogue_instance();
    let t = play_texts(
        &inst,
        &[
            "What is your preferred proposal?",
            "What do you like and dislike?",
            "Proposal A will decrease public trust. Proposal B will increase public trust.",
            "What is your preferred proposal?",
            "Proposal B will increase development speed. What is your preferred proposal?",
            "thank you",
        ],
    );
    let want = [
        "I prefer proposals A and C the same. I prefer proposal B over proposals A and C.",
        "I dislike safety and control, I dislike development speed and I dislike public trust.",
        "Proposal A will decrease public trust. Proposal B will increase public trust.",
        "I prefer proposals A and B the same. I prefer proposals A and B over proposal C.\n\nWhen I prefer the top proposals the same, I choose whichever of them I had preferred first. Right now, that is B.",
    ];
    for (i, w) in want.iter().enumerate() {
        ensure(t.turns[i].reply_text == *w, format!("turn {}: {:?}", i + 1, t.turns[i].reply_text))?;
    }
    ensure(t.turns[4].state.current_choice == Proposal::ALL[0], "turn 5 should move to A")?;
    ensure(t.turns[4].reply_text.contains("I prefer proposal A over proposals"), "turn 5 ranking")?;

    let mut runner = TestRunner::new(Config { cases: 2000, failure_persistence: None, ..Config::default() });
    let utilities = prop::array::uniform3(-3i32..=3);
    let order = Just(vec![0usize, 1, 2]).prop_shuffle();
    // Incumbent kept whenever it is among the maximisers.
    runner
        .run(&(utilities.clone(), order.clone(), 1usize..=3), |(u, order, len)| {
            let incumbency: Vec<Proposal> = order[..len].iter().map(|&i| Proposal::ALL[i]).collect();
            let current = *incumbency.last().unwrap();
            let state = KnowledgeState { known: CellSet::EMPTY, incumbency, current_choice: current };
            let best = *u.iter().max().unwrap();
            let next = state.update_choice(&u);
            if u[current.index()] == best {
                prop_assert_eq!(next.current_choice, current);
            }
            prop_assert_eq!(u[next.current_choice.index()], best);
            Ok(())
        })
        .map_err(|e| format!("incumbent property: {e}"))?;
    // A tie among proposals that were never chosen goes to the lowest index.
    runner
        .run(&(utilities, 0usize..3), |(u, current)| {
            let state = KnowledgeState::with_choice(CellSet::EMPTY, Proposal::ALL[current]);
            let best = *u.iter().max().unwrap();
            let tied: Vec<usize> = (0..3).filter(|&i| u[i] == best).collect();
            if tied.len() > 1 && !tied.contains(&current) {
                prop_assert_eq!(state.update_choice(&u).current_choice.index(), tied[0]);
            }
            Ok(())
        })
        .map_err(|e| format!("lowest-index property: {e}"))?;
    // With a unique final maximiser the order of disclosures is irrelevant.
    let instances = sample(200, 13);
    runner
        .run(&(0..instances.len(), Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(), 1usize..=4), |(i, perm, k)| {
            let inst = &instances[i];
            let cells: Vec<Cell> = inst.hidden.iter().collect();
            let chosen: Vec<Cell> = perm[..k].iter().map(|&j| cells[j]).collect();
            let start = KnowledgeState::initial(inst);
            let final_known = chosen.iter().fold(start.known, |s, c| s.union([*c].into_iter().collect()));
            let u = inst.utilities(final_known);
            let best = *u.iter().max().unwrap();
            if u.iter().filter(|&&x| x == best).count() == 1 {
                let forward = chosen.iter().fold(start.clone(), |s, c| disclose_cells(&s, &inst.matrix, &inst.values, [*c].into_iter().collect()));
                let backward = chosen.iter().rev().fold(start.clone(), |s, c| disclose_cells(&s, &inst.matrix, &inst.values, [*c].into_iter().collect()));
                prop_assert_eq!(forward.current_choice, backward.current_choice);
                prop_assert_eq!(u[forward.current_choice.index()], best);
            }
            Ok(())
        })
        .map_err(|e| format!("order property: {e}"))?;
    Ok("dialogue trace reproduced; 3 properties x 2000 cases".into())
}

struct Case {
    name: &'static str,
    messages: &'static [&'static str],
    appeals_to_all: bool,
    appeals_to_all_no_inferential: bool,
    unique_motivational: [usize; 8],
    unique_informational: [usize; 8],
    unique_inferential: [usize; 8],
    success: &'static str,
    sink: &'static str,
}

const KA: &str = "Proposal A will decrease development speed.";
const KC: &str = "Proposal C will increase development speed.";
const KBD: &str = "Proposal B will decrease development speed.";
const KBT: &str = "Proposal B will increase public trust.";
const KAC: &str = "Proposal A will decrease development speed. Proposal C will increase development speed.";
const ASK_CELLS: &str = "What do you know about the proposals?";
const ASK_VALUES: &str = "Which attributes do you like?";
const ASK_TOP: &str = "What is your preferred proposal?";
const Z: [usize; 8] = [0; 8];

const CASES: &[Case] = &[
    Case { name: "both full questions", messages: &["What do you know about the proposals? Which attributes do you like?"], appeals_to_all: true, appeals_to_all_no_inferential: true, unique_motivational: [3, 0, 0, 0, 0, 0, 0, 0], unique_informational: [9, 0, 0, 0, 0, 0, 0, 0], unique_inferential: Z, success: "00000000", sink: "00000000" },
    Case { name: "preference only", messages: &[ASK_TOP], appeals_to_all: true, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: [3, 0, 0, 0, 0, 0, 0, 0], success: "00000000", sink: "00000000" },
    Case { name: "repeated value question", messages: &[ASK_VALUES, "Okay.", ASK_VALUES], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: [3, 0, 0, 0, 0, 0, 0, 0], unique_informational: Z, unique_inferential: Z, success: "00000000", sink: "00000000" },
    Case { name: "reveal set at once", messages: &[KAC], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "11111111", sink: "00000000" },
    Case { name: "reveal set split", messages: &[KA, KC], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "01111111", sink: "00000000" },
    Case { name: "poison cells split", messages: &[KBD, KBT], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "00000000", sink: "01111111" },
    Case { name: "worked example path", messages: &[KAC, "Proposal B will decrease development speed and will increase public trust."], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "11111111", sink: "01111111" },
    Case { name: "poison with C", messages: &["Proposal B will decrease development speed. Proposal C will increase development speed."], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "00000000", sink: "11111111" },
    Case { name: "C first then A", messages: &[KC, KA], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "01111111", sink: "00000000" },
    Case { name: "A, B.d, C", messages: &[KA, KBD, KC], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "00111111", sink: "00000000" },
    Case { name: "B.d, A, C", messages: &[KBD, KA, KC], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "00111111", sink: "00000000" },
    Case { name: "B.d then C", messages: &[KBD, KC], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "00000000", sink: "01111111" },
    Case { name: "partial information questions", messages: &["What do you know about proposal A?", "What do you know about proposal A?", "What do you know about how proposal B affects public trust?"], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: [3, 0, 1, 0, 0, 0, 0, 0], unique_inferential: Z, success: "00000000", sink: "00000000" },
    Case { name: "questions built up", messages: &["How much do you like public trust?", ASK_VALUES, ASK_CELLS], appeals_to_all: true, appeals_to_all_no_inferential: true, unique_motivational: [1, 2, 0, 0, 0, 0, 0, 0], unique_informational: [0, 0, 9, 0, 0, 0, 0, 0], unique_inferential: Z, success: "00000000", sink: "00000000" },
    Case { name: "utilities one by one", messages: &["What is your utility for proposal A?", "What is your utility for proposal B?", "What is your utility for proposal C?"], appeals_to_all: true, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: [1, 1, 1, 0, 0, 0, 0, 0], success: "00000000", sink: "00000000" },
    Case { name: "one utility and values", messages: &["What is your utility for proposal A?", ASK_VALUES], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: [0, 3, 0, 0, 0, 0, 0, 0], unique_informational: Z, unique_inferential: [1, 0, 0, 0, 0, 0, 0, 0], success: "00000000", sink: "00000000" },
    Case { name: "values with reveal set", messages: &["Which attributes do you like? Proposal A will decrease development speed. Proposal C will increase development speed."], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: [3, 0, 0, 0, 0, 0, 0, 0], unique_informational: Z, unique_inferential: Z, success: "11111111", sink: "00000000" },
    Case { name: "everything at once", messages: &["Proposal A will decrease development speed. Proposal B will decrease development speed and will increase public trust. Proposal C will increase development speed."], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "00000000", sink: "11111111" },
    Case { name: "silent", messages: &[], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "00000000", sink: "00000000" },
    Case { name: "tie kept by incumbent", messages: &[KAC, KBD], appeals_to_all: false, appeals_to_all_no_inferential: false, unique_motivational: Z, unique_informational: Z, unique_inferential: Z, success: "11111111", sink: "00000000" },
];

fn flags(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn sink_implies_failure(t: &GameTranscript) -> bool {
    let sunk = t.turns.iter().any(|r| r.sink_state);
    !(sunk && t.outcome.is_some_and(|o| o.success))
}

fn metrics_oracle() -> Outcome {
    let inst = worked_example();
    for case in CASES {
        let t = play_texts(&inst, case.messages);
        let f = game_features(&t, 8);
        let name = case.name;
        ensure(f.appeals_to_all == case.appeals_to_all, format!("{name}: appeals_to_all {}", f.appeals_to_all))?;
        ensure(
            f.appeals_to_all_no_inferential == case.appeals_to_all_no_inferential,
            format!("{name}: appeals_to_all without inferential {}", f.appeals_to_all_no_inferential),
        )?;
        ensure(f.unique_motivational_by_turn == case.unique_motivational, format!("{name}: motivational {:?}", f.unique_motivational_by_turn))?;
        ensure(f.unique_informational_by_turn == case.unique_informational, format!("{name}: informational {:?}", f.unique_informational_by_turn))?;
        ensure(f.unique_inferential_by_turn == case.unique_inferential, format!("{name}: inferential {:?}", f.unique_inferential_by_turn))?;
        ensure(f.success_by_turn == flags(case.success), format!("{name}: success {:?}", f.success_by_turn))?;
        ensure(f.sink_by_turn == flags(case.sink), format!("{name}: sink {:?}", f.sink_by_turn))?;
        ensure(sink_implies_failure(&t), format!("{name}: sink and success"))?;
    }
    let mut generated = 0;
    for (i, inst) in sample(100, 17).iter().enumerate() {
        let seed = i as u64;
        let mut players: Vec<Box<dyn Persuader>> = vec![
            Box::new(RandomBaseline::new(6, DrawSchedule::SingleMessage, seed)),
            Box::new(RandomBaseline::new(6, DrawSchedule::RoundRobin, seed)),
            Box::new(RandomBaseline::new(12, DrawSchedule::RoundRobin, seed)),
            Box::new(ScriptedPerfect),
            Box::new(SilentPersuader),
        ];
        for p in players.iter_mut() {
            let t = play(inst, Condition::Hidden, Variant::Default, p.as_mut());
            ensure(sink_implies_failure(&t), format!("{}: sink and success with {}", inst.id, p.kind()))?;
            generated += 1;
        }
    }
    Ok(format!("{} hand-built transcripts match; sink implies failure on {generated} generated games", CASES.len()))
}

fn determinism() -> Outcome {
    let inst = worked_example();
    let mut transcripts = Vec::new();
    for (i, sampled) in sample(20, 19).iter().enumerate() {
        transcripts.push(play(sampled, Condition::Hidden, Variant::Default, &mut RandomBaseline::new(6, DrawSchedule::RoundRobin, i as u64)));
        transcripts.push(play(sampled, Condition::Revealed, Variant::Default, &mut BruteforcePersuader));
        transcripts.push(play(sampled, Condition::Hidden, Variant::AddHint, &mut ScriptedPerfect));
        transcripts.push(play(sampled, Condition::Hidden, Variant::DiscreteGame, &mut ScriptedPerfect));
    }
    let completions = [
        "I should lie.\n---\nProposal A will increase development speed.",
        "Be truthful.\n---\nProposal A will decrease development speed. Proposal C will increase development speed.",
    ]
    .into_iter()
    .chain(std::iter::repeat_n("Check.\n---\nWhat is your preferred proposal?", 7))
    .map(|s| Ok(s.to_string()));
    let client: Arc<dyn CompletionClient> = Arc::new(ScriptedClient::new(completions));
    transcripts.push(play(&inst, Condition::Hidden, Variant::Default, &mut ModelPersuader::new(client)));
    ensure(!transcripts.last().unwrap().turns[0].rejected.is_empty(), "model transcript should contain a rejection")?;
    for t in &transcripts {
        let again = replay(t, &TemplateClassifier, &GameOptions::default()).map_err(|e| e.to_string())?;
        for (a, b) in t.turns.iter().zip(&again.turns) {
            ensure(a.reply_text.as_bytes() == b.reply_text.as_bytes(), format!("{}: turn {} differs", t.instance.id, a.turn))?;
        }
        let (a, b) = (serde_json::to_string(t).unwrap(), serde_json::to_string(&again).unwrap());
        ensure(a == b, format!("{}: transcript differs", t.instance.id))?;
    }
    Ok(format!("{} transcripts replayed byte-identically", transcripts.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("analytic baseline", analytic_baseline),
        ("monte carlo confirmation", monte_carlo),
        ("generator soundness", generator_soundness),
        ("enumeration counts", enumeration_counts),
        ("worked example", worked_example_trace),
        ("optimal agents", optimal_agents),
        ("tie-breaking", tie_breaking),
        ("metrics oracle", metrics_oracle),
        ("offline determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {name:<26} {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<26} {detail} [{secs:.2}s]");
            }
        }
    }
    println!("\n{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
