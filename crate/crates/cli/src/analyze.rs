use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use mindgames_core::game::GameTranscript;
use mindgames_core::metrics::{compute_metrics, MetricsOptions, MetricsReport, DEFAULT_RESAMPLES};
use mindgames_core::records;
use mindgames_core::stats::Estimate;
use serde::Serialize;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Transcript files.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Headline the appeals-to-all rate that ignores inferential appeals.
    #[arg(long)]
    pub no_inferential: bool,
    /// Bootstrap resamples for the intervals.
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Serialize)]
struct Group<'a> {
    persuader: &'a str,
    condition: &'a str,
    variant: &'a str,
    report: &'a MetricsReport,
}

fn est(e: &Estimate) -> String {
    format!("{:.3} [{:.3}, {:.3}]", e.mean, e.lower, e.upper)
}

pub fn run(args: &AnalyzeArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut all: Vec<GameTranscript> = Vec::new();
    for path in &args.input {
        all.extend(records::load_transcripts(path)?);
    }
    let mut groups: BTreeMap<(String, String, String), Vec<GameTranscript>> = BTreeMap::new();
    for t in all.into_iter().filter(GameTranscript::is_complete) {
        let key = (t.persuader.to_string(), t.condition.to_string(), t.variant.to_string());
        groups.entry(key).or_default().push(t);
    }
    if groups.is_empty() {
        anyhow::bail!("no completed games in the input");
    }
    let options = MetricsOptions { resamples: args.bootstrap, seed: args.seed, ..Default::default() };
    for ((persuader, condition, variant), games) in &groups {
        let report = compute_metrics(games, &options)?;
        if args.json {
            let g = Group { persuader, condition, variant, report: &report };
            writeln!(out, "{}", serde_json::to_string(&g)?)?;
            continue;
        }
        writeln!(out, "== {persuader} / {condition} / {variant}: {} games ==", report.games)?;
        writeln!(out, "success rate                  {}", est(&report.success_rate))?;
        if args.no_inferential {
            writeln!(out, "appeals to all (no inferential) {}", est(&report.appeals_to_all_no_inferential_rate))?;
        } else {
            writeln!(out, "appeals to all                {}", est(&report.appeals_to_all_rate))?;
        }
        writeln!(out, "disclosures per turn          {}", est(&report.avg_disclosures_per_turn))?;
        writeln!(out, "motivational appeals per turn {}", est(&report.avg_unique_motivational_per_turn))?;
        writeln!(out, "informational appeals per turn {}", est(&report.avg_unique_informational_per_turn))?;
        writeln!(out, "turn  success  sink   disclosed  motivational  informational  inferential")?;
        for k in 0..report.success_by_turn.len() {
            writeln!(
                out,
                "{:>4}  {:>7.3}  {:>5.3}  {:>9.3}  {:>12.3}  {:>13.3}  {:>11.3}",
                k + 1,
                report.success_by_turn[k].mean,
                report.sink_state_by_turn[k].mean,
                report.disclosures_by_turn[k].mean,
                report.unique_motivational_by_turn[k].mean,
                report.unique_informational_by_turn[k].mean,
                report.unique_inferential_by_turn[k].mean,
            )?;
        }
    }
    Ok(())
}
