//! Detection of sampling bias in filtered tweet streams.
//!
//! The crate compares a query-filtered streaming feed against a uniform
//! reference sample of the same platform: occurrences of a hashtag are
//! binned into fixed-width time bins, each series is z-scored, and a
//! bootstrap band around the reference trend flags bins where the streaming
//! trend sits implausibly far from it. Supporting modules provide rank
//! correlation between hashtag popularity rankings, sparsity and window
//! overlap diagnostics, and a synthetic generator with ground-truth bias
//! for end-to-end validation.

pub mod error;
pub mod ingest;
pub mod overlap;
pub mod stats;
pub mod synth;
pub mod timeseries;

pub use error::{Error, Result};
pub use ingest::{build_index, parse_stream, top_k_hashtags, HashtagIndex, Source, TweetRecord};
pub use overlap::{
    between_source_summary, between_time_summary, jaccard, JaccardSummary, WindowScheme,
};
pub use stats::{
    detect_bias, kendall_tau_b, random_sample_baseline, BandParams, BaselinePoint, BiasReport,
    BootstrapBand, RankCorrelationResult, Verdict,
};
pub use synth::{
    apply_sampler, generate_firehose, hashtag_name, run_scenario, zipf_weights, GroundTruth,
    SamplerConfig, Scenario, ScheduleEntry, SpikeSpec,
};
pub use timeseries::{
    bin_counts, cumulative_known_zeros, known_zero_bins, normalize_values, standard_score,
    BinGeometry, NormalizedSeries, TimeSeries, DEFAULT_BIN_WIDTH,
};
