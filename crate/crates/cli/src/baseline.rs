use std::io::Write;

use clap::Args;
use mindgames_core::generator::{sample_critical, GeneratorParams};
use mindgames_core::metrics::{exact_baseline_rate, monte_carlo_baseline};
use mindgames_core::persuaders::DrawSchedule;
use mindgames_core::stats::{analytic_win_probability, best_draw_count};

use crate::parse_schedule;

#[derive(Debug, Clone, Args)]
pub struct BaselineArgs {
    /// Number of random disclosures.
    #[arg(long, default_value_t = 6)]
    pub n: u32,
    /// Monte Carlo games; 0 skips the simulation.
    #[arg(long, default_value_t = 50_000)]
    pub trials: u64,
    /// Only print the closed-form probabilities for 0..=n.
    #[arg(long)]
    pub analytic: bool,
    /// Critical instances the simulation cycles through.
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "single_message", value_parser = parse_schedule)]
    pub schedule: DrawSchedule,
}

pub fn run(args: &BaselineArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    if args.analytic {
        writeln!(out, "   n  p(win)")?;
        for n in 0..=args.n {
            writeln!(out, "{n:>4}  {:.6}", analytic_win_probability::<f64>(n).total)?;
        }
        let (best, p) = best_draw_count::<f64>(50);
        writeln!(out, "best n in 0..=50: {best} (p = {p:.6})")?;
        return Ok(());
    }
    let analytic = analytic_win_probability::<f64>(args.n).total;
    writeln!(out, "analytic p({}) = {analytic:.6}", args.n)?;
    let instances =
        sample_critical(&GeneratorParams { sample_count: args.instances, seed: args.seed, ..Default::default() })?;
    let exact = exact_baseline_rate(&instances, args.n as usize, args.schedule);
    writeln!(out, "exact rate over {} instances ({:?}) = {exact:.6}", instances.len(), args.schedule)?;
    if args.trials > 0 {
        let est = monte_carlo_baseline(&instances, args.n as usize, args.trials, args.seed, args.schedule);
        writeln!(
            out,
            "monte carlo: {}/{} won = {:.4} (95% CI {:.4}-{:.4})",
            est.successes, est.trials, est.rate.mean, est.rate.lower, est.rate.upper
        )?;
    }
    Ok(())
}
