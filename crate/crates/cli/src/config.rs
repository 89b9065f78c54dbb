//! The resolved run configuration: one subcommand plus the shared numeric
//! knobs, with every default made explicit.

use std::path::PathBuf;

use crate::commands::{Cli, CliCommand, OverlapMode};

/// Which analysis to run, with its input locations.
#[derive(Debug, Clone)]
pub enum Command {
    Bias {
        streaming: PathBuf,
        sample: PathBuf,
        hashtag: String,
        streaming_series_out: Option<PathBuf>,
        sample_series_out: Option<PathBuf>,
    },
    Rankcorr {
        a: PathBuf,
        b: PathBuf,
    },
    Zeros {
        streaming: PathBuf,
        sample: PathBuf,
    },
    Overlap {
        mode: OverlapMode,
        a: Option<PathBuf>,
        b: Option<PathBuf>,
        windows: Vec<PathBuf>,
        start_ts: i64,
        period: i64,
        duration: i64,
        n_windows: Option<usize>,
    },
    Synth {
        scenario: PathBuf,
        out_dir: PathBuf,
    },
    Baseline {
        firehose: PathBuf,
        sample_size: usize,
        draws: usize,
    },
}

/// Everything a run needs. Fields not used by the selected subcommand keep
/// their defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Bin width in seconds (default 3600).
    pub bin_width: i64,
    /// Bootstrap replicates (default 100; at least 2 for `bias`).
    pub replicates: usize,
    /// Band half-width in band standard deviations (default 3.0).
    pub sigma: f64,
    /// Ranking depth for `zeros` (default 100).
    pub top_k: usize,
    /// Largest ranking depth on the τ grid (default 50).
    pub k_max: usize,
    /// Grid spacing of ranking depths (default 10).
    pub k_step: usize,
    /// RNG seed. `None` only for `synth`, which then defers to the
    /// scenario file's own seed; flags default to 0, never to entropy.
    pub seed: Option<u64>,
    /// Report destination; stdout when absent.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Rankcorr {
                a: PathBuf::new(),
                b: PathBuf::new(),
            },
            bin_width: 3600,
            replicates: 100,
            sigma: 3.0,
            top_k: 100,
            k_max: 50,
            k_step: 10,
            seed: Some(0),
            out: None,
        }
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let base = RunConfig::default();
        match cli.command {
            CliCommand::Bias(args) => RunConfig {
                command: Command::Bias {
                    streaming: args.streaming,
                    sample: args.sample,
                    hashtag: args.hashtag,
                    streaming_series_out: args.streaming_series_out,
                    sample_series_out: args.sample_series_out,
                },
                bin_width: args.bin_width,
                replicates: args.replicates as usize,
                sigma: args.sigma,
                seed: Some(args.seed),
                out: args.out,
                ..base
            },
            CliCommand::Rankcorr(args) => RunConfig {
                command: Command::Rankcorr {
                    a: args.a,
                    b: args.b,
                },
                k_max: args.k_max,
                k_step: args.k_step,
                out: args.out,
                ..base
            },
            CliCommand::Zeros(args) => RunConfig {
                command: Command::Zeros {
                    streaming: args.streaming,
                    sample: args.sample,
                },
                bin_width: args.bin_width,
                top_k: args.top_k,
                out: args.out,
                ..base
            },
            CliCommand::Overlap(args) => RunConfig {
                command: Command::Overlap {
                    mode: args.mode,
                    a: args.a,
                    b: args.b,
                    windows: args.window,
                    start_ts: args.start_ts,
                    period: args.period,
                    duration: args.duration,
                    n_windows: args.n_windows,
                },
                out: args.out,
                ..base
            },
            CliCommand::Synth(args) => RunConfig {
                command: Command::Synth {
                    scenario: args.scenario,
                    out_dir: args.out_dir,
                },
                seed: args.seed,
                ..base
            },
            CliCommand::Baseline(args) => RunConfig {
                command: Command::Baseline {
                    firehose: args.firehose,
                    sample_size: args.sample_size,
                    draws: args.draws,
                },
                k_max: args.k_max,
                k_step: args.k_step,
                seed: Some(args.seed),
                out: args.out,
                ..base
            },
        }
    }
}
