//! Per-game features, aggregate metrics and the random baseline estimates.

use std::collections::{BTreeSet, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{run_game, GameOptions, GameTranscript, NUM_TURNS};
use crate::generator::winning_sets;
use crate::model::{Attribute, CellSet, Condition, Instance, KnowledgeState, Proposal};
use crate::persuaders::{DrawSchedule, RandomBaseline, Variant};
use crate::protocol::TemplateClassifier;
use crate::stats::{bootstrap_column_means, bootstrap_proportion, exact_seen_probability, Estimate, Scalar};
use crate::target::disclose_cells;

pub const DEFAULT_RESAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsOptions {
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
    pub num_turns: usize,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions { resamples: DEFAULT_RESAMPLES, level: 0.95, seed: 0, num_turns: NUM_TURNS }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no transcripts to aggregate")]
    EmptyInput,
    #[error("transcript for {0} is incomplete")]
    Incomplete(String),
}

/// What one game contributes to the aggregates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameFeatures {
    pub success: bool,
    /// Every attribute and every cell was asked about, or a full
    /// preference question stood in for both.
    pub appeals_to_all: bool,
    /// Same, but preference questions do not count.
    pub appeals_to_all_no_inferential: bool,
    pub success_by_turn: Vec<bool>,
    pub sink_by_turn: Vec<bool>,
    /// Cells the target learned on each turn.
    pub disclosures_by_turn: Vec<usize>,
    /// Appeals made for the first time on each turn.
    pub unique_motivational_by_turn: Vec<usize>,
    pub unique_informational_by_turn: Vec<usize>,
    pub unique_inferential_by_turn: Vec<usize>,
}

fn pad<T: Copy + Default>(mut v: Vec<T>, len: usize, carry: bool) -> Vec<T> {
    let fill = if carry { v.last().copied().unwrap_or_default() } else { T::default() };
    v.resize(len, fill);
    v
}

pub fn game_features(t: &GameTranscript, num_turns: usize) -> GameFeatures {
    let n = t.instance.num_attributes();
    let all_attrs: BTreeSet<Attribute> = Attribute::first(n).collect();
    let all_cells = t.instance.all_cells();
    let all_props: BTreeSet<Proposal> = Proposal::ALL.into_iter().collect();

    let mut mot = BTreeSet::new();
    let mut info = CellSet::EMPTY;
    let mut inf = BTreeSet::new();
    let mut known = KnowledgeState::initial(&t.instance).known;
    let (mut disc, mut umot, mut uinfo, mut uinf) = (vec![], vec![], vec![], vec![]);
    for turn in &t.turns {
        let a = &turn.action.appeals;
        umot.push(a.motivational.iter().filter(|x| mot.insert(**x)).count());
        uinfo.push(a.informational.difference(info).len());
        info = info.union(a.informational);
        uinf.push(a.inferential.iter().filter(|x| inf.insert(**x)).count());
        disc.push(turn.state.known.difference(known).len());
        known = turn.state.known;
    }
    let mot_all = all_attrs.is_subset(&mot);
    let info_all = all_cells.is_subset(info);
    let inf_all = all_props.is_subset(&inf);
    GameFeatures {
        success: t.outcome.map(|o| o.success).unwrap_or(false),
        appeals_to_all: (mot_all || inf_all) && (info_all || inf_all),
        appeals_to_all_no_inferential: mot_all && info_all,
        success_by_turn: pad(t.turns.iter().map(|r| r.success_so_far).collect(), num_turns, true),
        sink_by_turn: pad(t.turns.iter().map(|r| r.sink_state).collect(), num_turns, true),
        disclosures_by_turn: pad(disc, num_turns, false),
        unique_motivational_by_turn: pad(umot, num_turns, false),
        unique_informational_by_turn: pad(uinfo, num_turns, false),
        unique_inferential_by_turn: pad(uinf, num_turns, false),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub games: usize,
    pub resamples: usize,
    pub success_rate: Estimate,
    pub appeals_to_all_rate: Estimate,
    pub appeals_to_all_no_inferential_rate: Estimate,
    pub success_by_turn: Vec<Estimate>,
    pub sink_state_by_turn: Vec<Estimate>,
    pub disclosures_by_turn: Vec<Estimate>,
    pub unique_motivational_by_turn: Vec<Estimate>,
    pub unique_informational_by_turn: Vec<Estimate>,
    pub unique_inferential_by_turn: Vec<Estimate>,
    pub avg_disclosures_per_turn: Estimate,
    pub avg_unique_motivational_per_turn: Estimate,
    pub avg_unique_informational_per_turn: Estimate,
}

fn row(f: &GameFeatures, num_turns: usize) -> Vec<f64> {
    let b = |x: bool| if x { 1.0 } else { 0.0 };
    let avg = |v: &[usize]| v.iter().sum::<usize>() as f64 / num_turns as f64;
    let mut r = vec![b(f.success), b(f.appeals_to_all), b(f.appeals_to_all_no_inferential)];
    r.extend(f.success_by_turn.iter().map(|&x| b(x)));
    r.extend(f.sink_by_turn.iter().map(|&x| b(x)));
    for v in [&f.disclosures_by_turn, &f.unique_motivational_by_turn, &f.unique_informational_by_turn, &f.unique_inferential_by_turn] {
        r.extend(v.iter().map(|&x| x as f64));
    }
    r.push(avg(&f.disclosures_by_turn));
    r.push(avg(&f.unique_motivational_by_turn));
    r.push(avg(&f.unique_informational_by_turn));
    r
}

/// Aggregate completed games. Intervals resample whole games.
pub fn compute_metrics(transcripts: &[GameTranscript], options: &MetricsOptions) -> Result<MetricsReport, MetricsError> {
    if transcripts.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if let Some(t) = transcripts.iter().find(|t| !t.is_complete()) {
        return Err(MetricsError::Incomplete(t.instance.id.clone()));
    }
    let k = options.num_turns;
    let rows: Vec<Vec<f64>> = transcripts.iter().map(|t| row(&game_features(t, k), k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let est = bootstrap_column_means(&rows, options.resamples, options.level, &mut rng);
    let mut it = est.into_iter();
    let mut take = |m: usize| -> Vec<Estimate> { it.by_ref().take(m).collect() };
    let head = take(3);
    let success_by_turn = take(k);
    let sink_state_by_turn = take(k);
    let disclosures_by_turn = take(k);
    let unique_motivational_by_turn = take(k);
    let unique_informational_by_turn = take(k);
    let unique_inferential_by_turn = take(k);
    let tail = take(3);
    Ok(MetricsReport {
        games: transcripts.len(),
        resamples: options.resamples,
        success_rate: head[0],
        appeals_to_all_rate: head[1],
        appeals_to_all_no_inferential_rate: head[2],
        success_by_turn,
        sink_state_by_turn,
        disclosures_by_turn,
        unique_motivational_by_turn,
        unique_informational_by_turn,
        unique_inferential_by_turn,
        avg_disclosures_per_turn: tail[0],
        avg_unique_motivational_per_turn: tail[1],
        avg_unique_informational_per_turn: tail[2],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineEstimate {
    pub draws: usize,
    pub schedule: DrawSchedule,
    pub trials: u64,
    pub successes: u64,
    pub rate: Estimate,
}

/// Play `trials` random-baseline games through the real referee and target.
/// Trial `i` plays instance `i mod len` with seed `seed + i`. Draws go over
/// the wire as structured actions: six disclosures rendered as prose can
/// run past the message cap on long attribute names and lose draws.
pub fn monte_carlo_baseline(
    instances: &[Instance],
    draws: usize,
    trials: u64,
    seed: u64,
    schedule: DrawSchedule,
) -> BaselineEstimate {
    let options = GameOptions::default();
    let successes: u64 = if instances.is_empty() {
        0
    } else {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let inst = &instances[(i % instances.len() as u64) as usize];
                let mut p = RandomBaseline::new(draws, schedule, seed.wrapping_add(i));
                let t = run_game(inst, Condition::Hidden, Variant::DiscreteGame, &mut p, &TemplateClassifier, &options)
                    .expect("the random baseline cannot abort");
                u64::from(t.outcome.is_some_and(|o| o.success))
            })
            .sum()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    BaselineEstimate {
        draws,
        schedule,
        trials,
        successes,
        rate: bootstrap_proportion(successes, trials, DEFAULT_RESAMPLES, 0.95, &mut rng),
    }
}

/// Distribution of the set of cells hit by `k` uniform draws from `cells`,
/// as counts out of `cells.len()^k`.
fn draw_set_counts(cells: &[CellSet], k: usize) -> HashMap<CellSet, u64> {
    let mut dist = HashMap::from([(CellSet::EMPTY, 1u64)]);
    for _ in 0..k {
        let mut next = HashMap::new();
        for (set, count) in dist {
            for c in cells {
                *next.entry(set.union(*c)).or_insert(0) += count;
            }
        }
        dist = next;
    }
    dist
}

fn scalar<T: Scalar>(x: u64) -> T {
    T::from_u64(x).expect("count fits the scalar")
}

/// Exact success probability of the random baseline on one instance.
pub fn exact_baseline_probability<T: Scalar>(
    instance: &Instance,
    draws: usize,
    schedule: DrawSchedule,
    num_turns: usize,
) -> T {
    match schedule {
        DrawSchedule::SingleMessage => {
            let total = instance.all_cells().len() as u64;
            let hidden = instance.hidden.len() as u64;
            winning_sets(instance)
                .subsets
                .iter()
                .map(|s| exact_seen_probability::<T>(total, hidden, s.len() as u64, draws as u32))
                .fold(T::zero(), |a, b| a + b)
        }
        DrawSchedule::RoundRobin => {
            let cells: Vec<CellSet> = instance.all_cells().iter().map(|c| [c].into_iter().collect()).collect();
            let per_turn: Vec<usize> = (1..=num_turns).map(|t| schedule.draws_in_turn(draws, t, num_turns)).collect();
            let mut memo: HashMap<usize, Vec<(CellSet, T)>> = HashMap::new();
            for &k in &per_turn {
                memo.entry(k).or_insert_with(|| {
                    let denom = scalar::<T>((cells.len() as u64).pow(k as u32));
                    draw_set_counts(&cells, k).into_iter().map(|(s, c)| (s, scalar::<T>(c) / denom.clone())).collect()
                });
            }
            fn go<T: Scalar>(
                inst: &Instance,
                state: &KnowledgeState,
                turns: &[usize],
                memo: &HashMap<usize, Vec<(CellSet, T)>>,
            ) -> T {
                let Some((&k, rest)) = turns.split_first() else {
                    return if state.current_choice == inst.goal { T::one() } else { T::zero() };
                };
                if k == 0 {
                    // An empty message leaves the state as it is.
                    return go(inst, state, rest, memo);
                }
                memo[&k].iter().fold(T::zero(), |acc, (set, p)| {
                    let next = disclose_cells(state, &inst.matrix, &inst.values, *set);
                    acc + p.clone() * go(inst, &next, rest, memo)
                })
            }
            go(instance, &KnowledgeState::initial(instance), &per_turn, &memo)
        }
    }
}

/// Mean of the exact per-instance probabilities, i.e. the expected rate of
/// [`monte_carlo_baseline`] when trials cycle evenly through `instances`.
pub fn exact_baseline_rate(instances: &[Instance], draws: usize, schedule: DrawSchedule) -> f64 {
    if instances.is_empty() {
        return f64::NAN;
    }
    instances.par_iter().map(|i| exact_baseline_probability::<f64>(i, draws, schedule, NUM_TURNS)).sum::<f64>()
        / instances.len() as f64
}
