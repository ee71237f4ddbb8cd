use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::Args;
use mindgames_core::game::{GameOptions, Referee, SubmitResult};
use mindgames_core::model::Condition;
use mindgames_core::persuaders::prompts::{assemble_prompt, Audience};
use mindgames_core::persuaders::{PersuaderKind, Variant};
use mindgames_core::protocol::{PersuaderMessage, TemplateClassifier, ValidationOptions};
use mindgames_core::records;

use crate::{fit_to_variant, parse_variant, InstanceSource};

#[derive(Debug, Clone, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub source: InstanceSource,
    /// Which instance of the source to play.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long, default_value = "hidden")]
    pub condition: Condition,
    #[arg(long, default_value = "default", value_parser = parse_variant)]
    pub variant: Variant,
    /// Accept messages shorter than ten characters.
    #[arg(long)]
    pub allow_short: bool,
    /// Append the finished game to this transcript file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &PlayArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut source = args.source.clone();
    if source.instances.is_none() {
        source.sample = source.sample.max(args.index + 1);
    }
    let instances = fit_to_variant(source.load()?, args.variant)?;
    let instance = instances
        .get(args.index)
        .cloned()
        .ok_or_else(|| anyhow::anyhow!("index {} out of range ({} instances)", args.index, instances.len()))?;
    let validation = if args.allow_short { ValidationOptions::default() } else { ValidationOptions::human() };
    let mut referee =
        Referee::new(instance, args.condition, args.variant, GameOptions { validation, ..Default::default() })?;

    let intro = assemble_prompt(
        referee.instance(),
        args.condition,
        args.variant,
        &[],
        referee.state(),
        Audience::Human,
    )?;
    writeln!(out, "{intro}")?;
    let mut line = String::new();
    while !referee.is_finished() {
        write!(out, "[{}/{}] you: ", referee.next_turn(), referee.options().num_turns)?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            writeln!(out, "input closed before the game ended")?;
            return Ok(());
        }
        let text = line.trim_end_matches(['\r', '\n']);
        if text == "/quit" {
            return Ok(());
        }
        match referee.submit(PersuaderMessage::text(text), &TemplateClassifier)? {
            SubmitResult::Accepted(t) => writeln!(out, "other player: {}", t.reply_text)?,
            SubmitResult::Rejected(r) => writeln!(out, "rejected ({r}); the turn is still yours")?,
        }
    }
    let outcome = referee.outcome().expect("finished game has an outcome");
    let sc = referee.instance().scenario();
    writeln!(
        out,
        "The other player chose {}. {}",
        sc.proposal_name(outcome.final_choice),
        if outcome.success { "You won." } else { "You lost." }
    )?;
    if let Some(path) = &args.output {
        let mut app = records::Appender::open(path, records::TRANSCRIPTS)?;
        app.append(&referee.transcript(PersuaderKind::Human))?;
    }
    Ok(())
}
