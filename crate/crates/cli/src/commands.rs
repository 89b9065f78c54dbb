//! Argument definitions and the dispatcher that turns a [`RunConfig`] into
//! report files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use streambias_core::stats::bootstrap::BandParams;
use streambias_core::{
    between_source_summary, between_time_summary, bin_counts, build_index,
    cumulative_known_zeros, detect_bias, kendall_tau_b, parse_stream, random_sample_baseline,
    run_scenario, standard_score, top_k_hashtags, BinGeometry, RankCorrelationResult, Scenario,
    Source, TweetRecord, WindowScheme,
};

use crate::config::{Command, RunConfig};
use crate::report;

#[derive(Debug, Parser)]
#[command(
    name = "streambias",
    version,
    about = "Detect sampling bias in filtered tweet streams",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Scan one hashtag for bins where the streaming trend leaves the
    /// sample's bootstrap band.
    Bias(BiasArgs),
    /// Kendall tau-b between two streams' top-k hashtag rankings over a
    /// grid of depths.
    Rankcorr(RankcorrArgs),
    /// Cumulative known-zero bins down the streaming popularity ranking.
    Zeros(ZerosArgs),
    /// Jaccard overlap of window ID sets, between two sources or across
    /// time within one source.
    Overlap(OverlapArgs),
    /// Generate a synthetic firehose, sampled streams, and ground truth.
    Synth(SynthArgs),
    /// Tau-b ranking agreement of repeated uniform subsamples against the
    /// full stream.
    Baseline(BaselineArgs),
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    /// Query-filtered stream (NDJSON).
    #[arg(long)]
    pub streaming: PathBuf,
    /// Uniform reference sample (NDJSON).
    #[arg(long)]
    pub sample: PathBuf,
    /// Hashtag to scan (lowercased before lookup).
    #[arg(long)]
    pub hashtag: String,
    /// Bin width in seconds.
    #[arg(long, default_value_t = 3600)]
    pub bin_width: i64,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
    pub replicates: u64,
    /// Band half-width in band standard deviations.
    #[arg(long, default_value_t = 3.0)]
    pub sigma: f64,
    /// RNG seed for the bootstrap.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also export the binned streaming series as CSV.
    #[arg(long)]
    pub streaming_series_out: Option<PathBuf>,
    /// Also export the binned sample series as CSV.
    #[arg(long)]
    pub sample_series_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankcorrArgs {
    /// First stream (NDJSON).
    #[arg(long)]
    pub a: PathBuf,
    /// Second stream (NDJSON).
    #[arg(long)]
    pub b: PathBuf,
    /// Largest ranking depth.
    #[arg(long, default_value_t = 50)]
    pub k_max: usize,
    /// Depth grid spacing.
    #[arg(long, default_value_t = 10)]
    pub k_step: usize,
    /// Report CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    /// Query-filtered stream (NDJSON).
    #[arg(long)]
    pub streaming: PathBuf,
    /// Uniform reference sample (NDJSON).
    #[arg(long)]
    pub sample: PathBuf,
    /// How many streaming hashtags to walk, most popular first.
    #[arg(long, default_value_t = 100)]
    pub top_k: usize,
    /// Bin width in seconds.
    #[arg(long, default_value_t = 3600)]
    pub bin_width: i64,
    /// Report CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OverlapMode {
    /// Compare two streams window by window.
    Source,
    /// Compare consecutive retrievals of one stream on their shared span.
    Time,
}

#[derive(Debug, Args)]
pub struct OverlapArgs {
    /// Comparison kind.
    #[arg(long, value_enum)]
    pub mode: OverlapMode,
    /// First stream (NDJSON); required for --mode source.
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Second stream (NDJSON); required for --mode source.
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Per-window retrieval file (NDJSON); repeat once per window for
    /// --mode time.
    #[arg(long)]
    pub window: Vec<PathBuf>,
    /// Timestamp the first window opens at.
    #[arg(long, default_value_t = 0)]
    pub start_ts: i64,
    /// Seconds between window starts.
    #[arg(long, default_value_t = 1200)]
    pub period: i64,
    /// Window length in seconds.
    #[arg(long, default_value_t = 1800)]
    pub duration: i64,
    /// Number of windows; required for --mode source, inferred from the
    /// --window files for --mode time.
    #[arg(long)]
    pub n_windows: Option<usize>,
    /// Report CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scenario description (JSON).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Directory for firehose.ndjson, stream_<i>.ndjson, ground_truth.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Overrides the scenario file's seed when given.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Full stream to subsample (NDJSON).
    #[arg(long)]
    pub firehose: PathBuf,
    /// Records per draw (without replacement).
    #[arg(long)]
    pub sample_size: usize,
    /// Number of independent draws.
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    /// Largest ranking depth.
    #[arg(long, default_value_t = 50)]
    pub k_max: usize,
    /// Depth grid spacing.
    #[arg(long, default_value_t = 10)]
    pub k_step: usize,
    /// RNG seed for the draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one configured subcommand to completion.
pub fn run(config: RunConfig) -> Result<()> {
    if !config.sigma.is_finite() || config.sigma <= 0.0 {
        bail!("--sigma must be a positive number, got {}", config.sigma);
    }
    if config.bin_width < 1 {
        bail!("--bin-width must be at least 1 second, got {}", config.bin_width);
    }
    match &config.command {
        Command::Bias { .. } => run_bias(&config),
        Command::Rankcorr { .. } => run_rankcorr(&config),
        Command::Zeros { .. } => run_zeros(&config),
        Command::Overlap { .. } => run_overlap(&config),
        Command::Synth { .. } => run_synth(&config),
        Command::Baseline { .. } => run_baseline(&config),
    }
}

fn load(path: &Path, source: Source) -> Result<Vec<TweetRecord>> {
    parse_stream(path, source).with_context(|| format!("reading {}", path.display()))
}

/// Smallest bin grid aligned to multiples of `bin_width` covering every
/// timestamp in the given streams.
fn spanning_geometry(streams: &[&[TweetRecord]], bin_width: i64) -> Result<BinGeometry> {
    let mut bounds: Option<(i64, i64)> = None;
    for stream in streams {
        for record in *stream {
            bounds = Some(match bounds {
                None => (record.ts, record.ts),
                Some((lo, hi)) => (lo.min(record.ts), hi.max(record.ts)),
            });
        }
    }
    let (lo, hi) = bounds.context("no records in any input; nothing to bin")?;
    let bin_start = lo.div_euclid(bin_width) * bin_width;
    let n_bins = ((hi - bin_start).div_euclid(bin_width) + 1) as usize;
    Ok(BinGeometry::new(bin_start, bin_width, n_bins))
}

fn depth_grid(k_max: usize, k_step: usize) -> Result<Vec<usize>> {
    if k_step == 0 {
        bail!("--k-step must be at least 1");
    }
    if k_max < k_step {
        bail!("--k-max ({k_max}) must be at least --k-step ({k_step})");
    }
    Ok((1..=k_max / k_step).map(|i| i * k_step).collect())
}

fn run_bias(config: &RunConfig) -> Result<()> {
    let Command::Bias {
        streaming,
        sample,
        hashtag,
        streaming_series_out,
        sample_series_out,
    } = &config.command
    else {
        unreachable!()
    };
    let streaming_records = load(streaming, Source::Streaming)?;
    let sample_records = load(sample, Source::Sample)?;
    let hashtag = hashtag.to_lowercase();
    let geometry = spanning_geometry(
        &[&streaming_records, &sample_records],
        config.bin_width,
    )?;
    let streaming_series = bin_counts(&build_index(&streaming_records), &hashtag, geometry);
    let sample_series = bin_counts(&build_index(&sample_records), &hashtag, geometry);
    let params = BandParams {
        n_replicates: config.replicates,
        sigma_multiplier: config.sigma,
        seed: config.seed.unwrap_or(0),
    };
    let bias = detect_bias(&streaming_series, &sample_series, &params)?;
    report::write_output(config.out.as_deref(), &report::bias_csv(&bias)?)?;
    if let Some(path) = streaming_series_out {
        let normalized = standard_score(&streaming_series);
        report::write_output(
            Some(path),
            &report::series_csv(&streaming_series, Some(&normalized))?,
        )?;
    }
    if let Some(path) = sample_series_out {
        let normalized = standard_score(&sample_series);
        report::write_output(
            Some(path),
            &report::series_csv(&sample_series, Some(&normalized))?,
        )?;
    }
    Ok(())
}

fn run_rankcorr(config: &RunConfig) -> Result<()> {
    let Command::Rankcorr { a, b } = &config.command else {
        unreachable!()
    };
    let index_a = build_index(&load(a, Source::Streaming)?);
    let index_b = build_index(&load(b, Source::Sample)?);
    let mut rows: Vec<RankCorrelationResult> = Vec::new();
    for k in depth_grid(config.k_max, config.k_step)? {
        let top_a = top_k_hashtags(&index_a, k);
        let top_b = top_k_hashtags(&index_b, k);
        let mut result = kendall_tau_b(&top_a, &top_b)
            .with_context(|| format!("comparing top-{k} rankings"))?;
        // The row is indexed by requested depth even when a stream has
        // fewer distinct hashtags than k.
        result.k = k;
        rows.push(result);
    }
    report::write_output(config.out.as_deref(), &report::rankcorr_csv(&rows)?)
}

fn run_zeros(config: &RunConfig) -> Result<()> {
    let Command::Zeros { streaming, sample } = &config.command else {
        unreachable!()
    };
    let streaming_records = load(streaming, Source::Streaming)?;
    let sample_records = load(sample, Source::Sample)?;
    let geometry = spanning_geometry(
        &[&streaming_records, &sample_records],
        config.bin_width,
    )?;
    let curve = cumulative_known_zeros(
        &build_index(&streaming_records),
        &build_index(&sample_records),
        config.top_k,
        geometry,
    );
    report::write_output(config.out.as_deref(), &report::zeros_csv(&curve)?)
}

fn run_overlap(config: &RunConfig) -> Result<()> {
    let Command::Overlap {
        mode,
        a,
        b,
        windows,
        start_ts,
        period,
        duration,
        n_windows,
    } = &config.command
    else {
        unreachable!()
    };
    if *period < 1 {
        bail!("--period must be at least 1 second");
    }
    if *duration < 1 {
        bail!("--duration must be at least 1 second");
    }
    let (label, summary) = match mode {
        OverlapMode::Source => {
            let (Some(a), Some(b)) = (a, b) else {
                bail!("--mode source needs both --a and --b");
            };
            let Some(n_windows) = n_windows else {
                bail!("--mode source needs --n-windows");
            };
            let scheme = WindowScheme {
                start_ts: *start_ts,
                period: *period,
                duration: *duration,
                n_windows: *n_windows,
            };
            let stream_a = load(a, Source::Streaming)?;
            let stream_b = load(b, Source::Sample)?;
            (
                "between_source",
                between_source_summary(&stream_a, &stream_b, &scheme)?,
            )
        }
        OverlapMode::Time => {
            if windows.is_empty() {
                bail!("--mode time needs at least one --window file");
            }
            if let Some(n) = n_windows {
                if *n != windows.len() {
                    bail!(
                        "--n-windows {} disagrees with {} --window files",
                        n,
                        windows.len()
                    );
                }
            }
            let scheme = WindowScheme {
                start_ts: *start_ts,
                period: *period,
                duration: *duration,
                n_windows: windows.len(),
            };
            let mut retrievals = Vec::with_capacity(windows.len());
            for path in windows {
                retrievals.push(load(path, Source::Sample)?);
            }
            (
                "between_time",
                between_time_summary(&retrievals, &scheme)?,
            )
        }
    };
    report::write_output(config.out.as_deref(), &report::overlap_csv(label, &summary)?)
}

fn write_ndjson_file(path: &Path, records: &[streambias_core::TweetRecord]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = std::io::BufWriter::new(file);
    streambias_core::ingest::write_ndjson(records, &mut writer)?;
    use std::io::Write as _;
    writer.flush()?;
    Ok(())
}

/// The portion of the ground truth that goes to disk; streams land in
/// their own NDJSON files.
#[derive(Serialize)]
struct GroundTruthFile<'t> {
    delta: f64,
    biased_bins: &'t std::collections::BTreeMap<String, std::collections::BTreeSet<usize>>,
}

fn run_synth(config: &RunConfig) -> Result<()> {
    let Command::Synth { scenario, out_dir } = &config.command else {
        unreachable!()
    };
    let text = fs::read_to_string(scenario)
        .with_context(|| format!("reading {}", scenario.display()))?;
    let mut scenario: Scenario = serde_json::from_str(&text)
        .with_context(|| "parsing scenario file")?;
    if let Some(seed) = config.seed {
        scenario.seed = seed;
    }
    let truth = run_scenario(&scenario)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    write_ndjson_file(&out_dir.join("firehose.ndjson"), &truth.firehose)?;
    for (i, stream) in truth.streams.iter().enumerate() {
        write_ndjson_file(&out_dir.join(format!("stream_{i}.ndjson")), stream)?;
    }
    let truth_json = serde_json::to_string_pretty(&GroundTruthFile {
        delta: truth.delta,
        biased_bins: &truth.biased_bins,
    })?;
    fs::write(out_dir.join("ground_truth.json"), truth_json + "\n")?;
    Ok(())
}

fn run_baseline(config: &RunConfig) -> Result<()> {
    let Command::Baseline {
        firehose,
        sample_size,
        draws,
    } = &config.command
    else {
        unreachable!()
    };
    let records = load(firehose, Source::Firehose)?;
    let grid = depth_grid(config.k_max, config.k_step)?;
    let points = random_sample_baseline(
        &records,
        *sample_size,
        *draws,
        &grid,
        config.seed.unwrap_or(0),
    )?;
    report::write_output(config.out.as_deref(), &report::baseline_csv(&points)?)
}
