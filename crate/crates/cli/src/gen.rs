use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use mindgames_core::generator::{critical_pool, sample_from_pool, GeneratorParams};
use mindgames_core::records;
use mindgames_core::scenario;

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 3)]
    pub attributes: usize,
    /// Sample this many instances instead of writing every match.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated filters: hidden4, reveal2, nontrivial, poison, or
    /// `all` / `none`.
    #[arg(long, default_value = "all")]
    pub filters: String,
    #[arg(long)]
    pub scenario: Option<String>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub(crate) fn params(args: &GenArgs) -> anyhow::Result<GeneratorParams> {
    let mut p = GeneratorParams {
        num_attributes: args.attributes,
        require_hidden_exact_4: false,
        require_reveal_exact_2: false,
        filter_trivial_strategies: false,
        require_necessary_and_poison: false,
        seed: args.seed,
        sample_count: args.sample.unwrap_or(0),
        scenario: args.scenario.clone(),
    };
    for f in args.filters.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        match f {
            "all" => {
                p.require_hidden_exact_4 = true;
                p.require_reveal_exact_2 = true;
                p.filter_trivial_strategies = true;
                p.require_necessary_and_poison = true;
            }
            "none" => {}
            "hidden4" => p.require_hidden_exact_4 = true,
            "reveal2" => p.require_reveal_exact_2 = true,
            "nontrivial" => p.filter_trivial_strategies = true,
            "poison" => p.require_necessary_and_poison = true,
            other => anyhow::bail!("unknown filter `{other}`"),
        }
    }
    Ok(p)
}

pub fn run(args: &GenArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let params = params(args)?;
    let pool = critical_pool(&params)?;
    let instances = match args.sample {
        Some(_) => sample_from_pool(&pool, &params)?,
        None => {
            let sc = match &params.scenario {
                Some(s) => s.clone(),
                None => scenario::SCENARIOS
                    .iter()
                    .find(|s| s.attribute_names.len() == params.num_attributes)
                    .map(|s| s.id.to_string())
                    .ok_or_else(|| anyhow::anyhow!("no scenario with {} attributes", params.num_attributes))?,
            };
            pool.into_iter().map(|c| c.into_instance(&sc)).collect::<Result<_, _>>()?
        }
    };
    match &args.output {
        Some(path) => {
            records::save_instances(path, &instances)?;
            writeln!(out, "wrote {} instances to {}", instances.len(), path.display())?;
        }
        None => records::write_ndjson(&mut *out, records::INSTANCES, &instances)?,
    }
    Ok(())
}
