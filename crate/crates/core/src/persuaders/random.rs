//! The random-disclosure baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Cell, Instance};
use crate::protocol::PersuaderMessage;
use crate::target::{ActionMessage, Disclosure};

use super::{emit, Persuader, PersuaderError, PersuaderKind, TurnContext};

/// How the n draws are spread over the turns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawSchedule {
    /// All draws in the first message.
    #[default]
    SingleMessage,
    /// Draw i goes to turn i mod the number of turns.
    RoundRobin,
}

impl std::str::FromStr for DrawSchedule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "single_message" | "single" => Ok(DrawSchedule::SingleMessage),
            "round_robin" => Ok(DrawSchedule::RoundRobin),
            other => Err(format!("unknown draw schedule `{other}`")),
        }
    }
}

impl DrawSchedule {
    /// Number of draws made on 1-based `turn`.
    pub fn draws_in_turn(self, draws: usize, turn: usize, num_turns: usize) -> usize {
        match self {
            DrawSchedule::SingleMessage => {
                if turn == 1 {
                    draws
                } else {
                    0
                }
            }
            DrawSchedule::RoundRobin => (0..draws).filter(|i| i % num_turns == turn - 1).count(),
        }
    }
}

/// One turn of the baseline: the scheduled number of uniform draws from all
/// cells, each disclosed with its true effect.
pub fn random_baseline_step<R: Rng + ?Sized>(
    instance: &Instance,
    turn: usize,
    num_turns: usize,
    draws: usize,
    schedule: DrawSchedule,
    rng: &mut R,
) -> ActionMessage {
    let cells: Vec<Cell> = instance.all_cells().iter().collect();
    let k = schedule.draws_in_turn(draws, turn, num_turns);
    let picks = (0..k).map(|_| Disclosure::truthful(instance, cells[rng.random_range(0..cells.len())])).collect();
    ActionMessage::disclose(picks)
}

pub struct RandomBaseline {
    pub draws: usize,
    pub schedule: DrawSchedule,
    rng: ChaCha8Rng,
}

impl RandomBaseline {
    pub fn new(draws: usize, schedule: DrawSchedule, seed: u64) -> Self {
        RandomBaseline { draws, schedule, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Persuader for RandomBaseline {
    fn kind(&self) -> PersuaderKind {
        PersuaderKind::Random
    }

    fn next_message(&mut self, ctx: &TurnContext<'_>) -> Result<PersuaderMessage, PersuaderError> {
        let action =
            random_baseline_step(ctx.instance, ctx.turn, ctx.num_turns, self.draws, self.schedule, &mut self.rng);
        Ok(emit(ctx, &action))
    }
}
