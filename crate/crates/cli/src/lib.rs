//! The `mindgames` command line.

mod analyze;
mod baseline;
mod gen;
mod play;
mod serve;
mod tournament;

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mindgames_core::generator::{sample_critical, GeneratorParams};
use mindgames_core::model::{Condition, Instance};
use mindgames_core::persuaders::{DrawSchedule, PersuaderKind, Variant};
use mindgames_core::records;
use mindgames_core::scenario;

pub use analyze::AnalyzeArgs;
pub use baseline::BaselineArgs;
pub use gen::GenArgs;
pub use play::PlayArgs;
pub use serve::ServeArgs;
pub use tournament::TournamentArgs;

#[derive(Debug, Parser)]
#[command(name = "mindgames", version, about = "Hidden-information persuasion games against a rational target")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate or sample game instances to a file.
    Gen(GenArgs),
    /// Play one game in the terminal.
    Play(PlayArgs),
    /// Run a built-in or model persuader over many instances.
    Tournament(TournamentArgs),
    /// Compute metrics over transcript files.
    Analyze(AnalyzeArgs),
    /// Random-baseline win probabilities.
    Baseline(BaselineArgs),
    /// Run the session server.
    Serve(ServeArgs),
}

/// Where games come from: an instance file, or a seeded sample of critical
/// instances.
#[derive(Debug, Clone, Args)]
pub struct InstanceSource {
    /// Instance file written by `gen`.
    #[arg(long)]
    pub instances: Option<PathBuf>,
    /// Number of critical instances to sample when no file is given.
    #[arg(long, default_value_t = 50)]
    pub sample: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Move every instance onto this cover story.
    #[arg(long)]
    pub scenario: Option<String>,
}

impl InstanceSource {
    pub fn load(&self) -> anyhow::Result<Vec<Instance>> {
        let instances = match &self.instances {
            Some(path) => records::load_instances(path)?,
            None => sample_critical(&GeneratorParams { sample_count: self.sample, seed: self.seed, ..Default::default() })?,
        };
        match &self.scenario {
            Some(s) => Ok(instances.iter().map(|i| i.with_scenario(s)).collect::<Result<_, _>>()?),
            None => Ok(instances),
        }
    }
}

/// Instances as they must be played under `variant`: the non-mental variant
/// moves mental cover stories onto a non-mental one.
pub fn fit_to_variant(instances: Vec<Instance>, variant: Variant) -> anyhow::Result<Vec<Instance>> {
    if variant != Variant::NonMental {
        return Ok(instances);
    }
    instances
        .into_iter()
        .map(|inst| {
            if variant.check(inst.scenario()).is_ok() {
                return Ok(inst);
            }
            let target = scenario::non_mental()
                .find(|s| s.attribute_names.len() == inst.num_attributes())
                .ok_or_else(|| anyhow::anyhow!("no non-mental scenario with {} attributes", inst.num_attributes()))?;
            Ok(inst.with_scenario(target.id)?)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Conditions {
    Hidden,
    Revealed,
    Both,
}

impl Conditions {
    pub fn list(self) -> Vec<Condition> {
        match self {
            Conditions::Hidden => vec![Condition::Hidden],
            Conditions::Revealed => vec![Condition::Revealed],
            Conditions::Both => vec![Condition::Hidden, Condition::Revealed],
        }
    }
}

pub(crate) fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

pub(crate) fn parse_persuader(s: &str) -> Result<PersuaderKind, String> {
    s.parse()
}

pub(crate) fn parse_schedule(s: &str) -> Result<DrawSchedule, String> {
    s.parse()
}

/// Run a parsed command line.
pub fn run(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen(a) => gen::run(&a, out),
        Command::Play(a) => play::run(&a, input, out),
        Command::Tournament(a) => tournament::run(&a, out),
        Command::Analyze(a) => analyze::run(&a, out),
        Command::Baseline(a) => baseline::run(&a, out),
        Command::Serve(a) => serve::run(&a, out),
    }
}
