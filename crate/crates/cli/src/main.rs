use std::io::{self, BufWriter};

use clap::Parser;
use mindgames_cli::{run, Cli};

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let stdin = io::stdin();
    let mut out = BufWriter::new(io::stdout());
    run(cli, &mut stdin.lock(), &mut out)
}
