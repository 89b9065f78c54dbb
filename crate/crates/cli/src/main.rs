//! `streambias` — command-line frontend over the stream-bias toolkit:
//! per-bin bias verdicts, rank-correlation grids, known-zero curves,
//! window-overlap summaries, synthetic scenario generation, and the
//! random-sampling τ baseline. Every subcommand is deterministic under a
//! fixed seed and writes CSV (or NDJSON/JSON for the generator).

mod commands;
mod config;
mod report;

use clap::Parser;

fn main() {
    let cli = commands::Cli::parse();
    let config = config::RunConfig::from(cli);
    if let Err(error) = commands::run(config) {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}
