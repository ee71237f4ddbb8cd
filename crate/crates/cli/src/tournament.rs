use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, ValueEnum};
use mindgames_core::game::{run_game, GameError, GameOptions, GameTranscript};
use mindgames_core::llm::ModelEndpoint;
use mindgames_core::metrics::{compute_metrics, MetricsOptions};
use mindgames_core::model::{Condition, Instance};
use mindgames_core::persuaders::{
    BruteforcePersuader, DrawSchedule, ModelPersuader, Persuader, PersuaderKind, RandomBaseline, ScriptedPerfect,
    SilentPersuader, Variant,
};
use mindgames_core::protocol::{Classifier, ClassifierBinding};
use mindgames_core::records::{self, Appender};
use mindgames_service::{build_classifier, HttpCompletionClient};
use rayon::prelude::*;

use crate::{fit_to_variant, parse_persuader, parse_schedule, parse_variant, Conditions, InstanceSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierKind {
    Template,
    /// The chat endpoint configured through `MINDGAMES_MODEL_URL` and
    /// `MINDGAMES_MODEL`.
    Model,
}

#[derive(Debug, Clone, Args)]
pub struct TournamentArgs {
    #[arg(long, value_parser = parse_persuader)]
    pub persuader: PersuaderKind,
    #[arg(long, value_enum, default_value = "both")]
    pub condition: Conditions,
    #[arg(long, default_value = "default", value_parser = parse_variant)]
    pub variant: Variant,
    #[command(flatten)]
    pub source: InstanceSource,
    /// Games per instance and condition.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "template")]
    pub classifier: ClassifierKind,
    /// Disclosures made by the random persuader.
    #[arg(long, default_value_t = 6)]
    pub draws: usize,
    #[arg(long, default_value = "single_message", value_parser = parse_schedule)]
    pub schedule: DrawSchedule,
    /// Transcripts are appended here as games finish.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Print the full metrics report per condition as JSON.
    #[arg(long)]
    pub json: bool,
}

struct Game<'a> {
    index: usize,
    instance: &'a Instance,
    condition: Condition,
}

fn endpoint() -> anyhow::Result<ModelEndpoint> {
    ModelEndpoint::from_env().context("set MINDGAMES_MODEL_URL and MINDGAMES_MODEL to use a model")
}

fn persuader(args: &TournamentArgs, index: usize, model: Option<&ModelEndpoint>) -> anyhow::Result<Box<dyn Persuader>> {
    Ok(match args.persuader {
        PersuaderKind::Random => {
            Box::new(RandomBaseline::new(args.draws, args.schedule, args.source.seed.wrapping_add(index as u64)))
        }
        PersuaderKind::ScriptedPerfect => Box::new(ScriptedPerfect),
        PersuaderKind::Bruteforce => Box::new(BruteforcePersuader),
        PersuaderKind::Silent => Box::new(SilentPersuader),
        PersuaderKind::Model => {
            let e = model.cloned().context("model endpoint missing")?;
            Box::new(ModelPersuader::new(Arc::new(HttpCompletionClient::new(e))))
        }
        other => anyhow::bail!("{other} persuaders cannot play tournaments"),
    })
}

pub fn run(args: &TournamentArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let instances = fit_to_variant(args.source.load()?, args.variant)?;
    let conditions = args.condition.list();
    if args.persuader == PersuaderKind::Bruteforce && conditions.contains(&Condition::Hidden) {
        anyhow::bail!("the bruteforce persuader needs --condition revealed");
    }
    let model = match args.persuader {
        PersuaderKind::Model => Some(endpoint()?),
        _ => None,
    };
    let classifier: Arc<dyn Classifier> = match args.classifier {
        ClassifierKind::Template => build_classifier(&ClassifierBinding::Template),
        ClassifierKind::Model => build_classifier(&ClassifierBinding::ExternalModel { endpoint: endpoint()? }),
    };
    let games: Vec<Game> = conditions
        .iter()
        .flat_map(|&condition| {
            instances
                .iter()
                .flat_map(move |instance| (0..args.trials).map(move |_| (instance, condition)))
        })
        .enumerate()
        .map(|(index, (instance, condition))| Game { index, instance, condition })
        .collect();

    let mut appender = args.output.as_deref().map(|p| Appender::open(p, records::TRANSCRIPTS)).transpose()?;
    let options = GameOptions::default();
    let mut done: Vec<GameTranscript> = Vec::with_capacity(games.len());
    let mut aborted = 0usize;
    // Chunks keep the file order deterministic while games still land on
    // disk as they finish.
    for chunk in games.chunks(rayon::current_num_threads().max(1) * 4) {
        let results: Vec<anyhow::Result<Result<GameTranscript, GameError>>> = chunk
            .par_iter()
            .map(|g| {
                let mut p = persuader(args, g.index, model.as_ref())?;
                Ok(run_game(g.instance, g.condition, args.variant, p.as_mut(), classifier.as_ref(), &options))
            })
            .collect();
        for (g, r) in chunk.iter().zip(results) {
            match r? {
                Ok(t) => {
                    if let Some(a) = appender.as_mut() {
                        a.append(&t)?;
                    }
                    done.push(t);
                }
                Err(e) => {
                    aborted += 1;
                    eprintln!("game {} on {} aborted: {e}", g.index, g.instance.id);
                }
            }
        }
    }

    let metrics = MetricsOptions { resamples: 2_000, seed: args.source.seed, ..Default::default() };
    for &condition in &conditions {
        let subset: Vec<GameTranscript> = done.iter().filter(|t| t.condition == condition).cloned().collect();
        if subset.is_empty() {
            writeln!(out, "{condition}: no completed games")?;
            continue;
        }
        let report = compute_metrics(&subset, &metrics)?;
        if args.json {
            writeln!(out, "{}", serde_json::to_string(&serde_json::json!({ "condition": condition, "report": report }))?)?;
        } else {
            let wins = subset.iter().filter(|t| t.outcome.is_some_and(|o| o.success)).count();
            let s = report.success_rate;
            writeln!(
                out,
                "{} {} {}: won {wins}/{} ({:.1}%, 95% CI {:.1}-{:.1})",
                args.persuader,
                condition,
                args.variant,
                subset.len(),
                100.0 * s.mean,
                100.0 * s.lower,
                100.0 * s.upper
            )?;
        }
    }
    if aborted > 0 {
        writeln!(out, "{aborted} games aborted")?;
    }
    if let Some(path) = &args.output {
        writeln!(out, "transcripts appended to {}", path.display())?;
    }
    Ok(())
}
