//! Synthetic tweet streams with planted, known bias: a Zipf-weighted
//! hashtag population, Poisson traffic per bin, optional spikes, and a set
//! of samplers that thin the firehose either fairly or unfairly.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Source, TweetRecord};
use crate::timeseries::{BinGeometry, DEFAULT_BIN_WIDTH};

/// Canonical name of the hashtag at popularity rank `rank` (0 = most
/// popular): `h0`, `h1`, ...
pub fn hashtag_name(rank: usize) -> String {
    format!("h{rank}")
}

/// A multiplicative burst of activity for one hashtag over
/// `[start_bin, end_bin)`. Overlapping spikes compose by multiplying.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpikeSpec {
    pub hashtag: String,
    pub start_bin: usize,
    pub end_bin: usize,
    pub multiplier: f64,
}

/// One planted distortion: while the bin index is in
/// `[start_bin, end_bin)`, records carrying `hashtag` are kept with
/// probability `p · gain` instead of `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub hashtag: String,
    pub start_bin: usize,
    pub end_bin: usize,
    pub gain: f64,
}

/// How a stream is thinned out of the firehose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerConfig {
    /// Fair Bernoulli thinning: every record kept with probability `p`.
    Uniform { p: f64 },
    /// Bernoulli thinning with per-hashtag, per-interval gain distortions.
    /// A record matching several entries uses the largest gain.
    BiasSchedule {
        p: f64,
        schedule: Vec<ScheduleEntry>,
    },
    /// Keeps only the first `cap` in-window records of every bin, in
    /// stream order; records outside the bin window pass through.
    RateCapHead { cap: u64 },
}

fn default_bin_width() -> i64 {
    DEFAULT_BIN_WIDTH
}

fn default_bias_delta() -> f64 {
    0.25
}

/// Complete recipe for one synthetic experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Number of distinct hashtags, named `h0` (most popular) onward.
    pub n_hashtags: usize,
    /// Zipf exponent shaping popularity: weight of rank r ∝ 1/(r+1)^s.
    pub zipf_exponent: f64,
    /// Expected total tweets per bin, across all hashtags, before spikes.
    pub base_rate: f64,
    pub n_bins: usize,
    #[serde(default = "default_bin_width")]
    pub bin_width: i64,
    #[serde(default)]
    pub spikes: Vec<SpikeSpec>,
    pub samplers: Vec<SamplerConfig>,
    #[serde(default)]
    pub seed: u64,
    /// A scheduled gain g counts as planted bias when |g − 1| ≥ this.
    #[serde(default = "default_bias_delta")]
    pub bias_delta: f64,
}

impl Scenario {
    /// The bin grid implied by the scenario, anchored at epoch 0.
    pub fn geometry(&self) -> BinGeometry {
        BinGeometry::new(0, self.bin_width, self.n_bins)
    }

    fn known_hashtag(&self, name: &str) -> bool {
        name.strip_prefix('h')
            .and_then(|digits| digits.parse::<usize>().ok())
            .is_some_and(|rank| rank < self.n_hashtags && name == hashtag_name(rank))
    }

    /// Checks every field; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &'static str, msg: String| Err(Error::Config { field, msg });
        if self.n_hashtags == 0 {
            return fail("n_hashtags", "need at least one hashtag".into());
        }
        if !self.zipf_exponent.is_finite() || self.zipf_exponent <= 0.0 {
            return fail(
                "zipf_exponent",
                format!("{} is not a positive exponent", self.zipf_exponent),
            );
        }
        if !self.base_rate.is_finite() || self.base_rate < 0.0 {
            return fail(
                "base_rate",
                format!("{} is not a non-negative rate", self.base_rate),
            );
        }
        if self.n_bins == 0 {
            return fail("n_bins", "need at least one bin".into());
        }
        if self.bin_width < 1 {
            return fail(
                "bin_width",
                format!("{} seconds is not a usable width", self.bin_width),
            );
        }
        if !self.bias_delta.is_finite() || self.bias_delta <= 0.0 {
            return fail(
                "bias_delta",
                format!("{} is not a positive threshold", self.bias_delta),
            );
        }
        for spike in &self.spikes {
            if !self.known_hashtag(&spike.hashtag) {
                return fail("spikes", format!("unknown hashtag '{}'", spike.hashtag));
            }
            if spike.start_bin >= spike.end_bin {
                return fail(
                    "spikes",
                    format!(
                        "spike interval {}..{} on '{}' is empty",
                        spike.start_bin, spike.end_bin, spike.hashtag
                    ),
                );
            }
            if spike.end_bin > self.n_bins {
                return fail(
                    "spikes",
                    format!(
                        "spike on '{}' covers bins {}..{} but there are only {}",
                        spike.hashtag, spike.start_bin, spike.end_bin, self.n_bins
                    ),
                );
            }
            if !spike.multiplier.is_finite() || spike.multiplier <= 0.0 {
                return fail(
                    "spikes",
                    format!("spike multiplier {} must be positive", spike.multiplier),
                );
            }
        }
        for sampler in &self.samplers {
            validate_sampler(sampler, self.n_bins)?;
            if let SamplerConfig::BiasSchedule { schedule, .. } = sampler {
                for entry in schedule {
                    if !self.known_hashtag(&entry.hashtag) {
                        return fail(
                            "samplers",
                            format!("schedule names unknown hashtag '{}'", entry.hashtag),
                        );
                    }
                }
            }
        }
        Ok(())
    }
}

/// Field checks that do not need scenario context (any record stream can
/// be run through a sampler, not just generated ones).
fn validate_sampler(config: &SamplerConfig, n_bins: usize) -> Result<()> {
    let fail = |msg: String| {
        Err(Error::Config {
            field: "samplers",
            msg,
        })
    };
    match config {
        SamplerConfig::Uniform { p } => {
            if !p.is_finite() || *p <= 0.0 || *p > 1.0 {
                return fail(format!("{p} is not a keep probability in (0, 1]"));
            }
        }
        SamplerConfig::BiasSchedule { p, schedule } => {
            if !p.is_finite() || *p <= 0.0 || *p > 1.0 {
                return fail(format!("{p} is not a keep probability in (0, 1]"));
            }
            let mut by_tag: HashMap<&str, Vec<&ScheduleEntry>> = HashMap::new();
            for entry in schedule {
                if entry.start_bin >= entry.end_bin {
                    return fail(format!(
                        "schedule interval {}..{} for '{}' is empty",
                        entry.start_bin, entry.end_bin, entry.hashtag
                    ));
                }
                if entry.end_bin > n_bins {
                    return fail(format!(
                        "schedule interval {}..{} for '{}' exceeds {} bins",
                        entry.start_bin, entry.end_bin, entry.hashtag, n_bins
                    ));
                }
                if !entry.gain.is_finite() || entry.gain < 0.0 {
                    return fail(format!(
                        "gain {} for '{}' is not a finite non-negative factor",
                        entry.gain, entry.hashtag
                    ));
                }
                if p * entry.gain > 1.0 {
                    return fail(format!(
                        "gain {} for '{}' lifts the keep probability above 1",
                        entry.gain, entry.hashtag
                    ));
                }
                by_tag.entry(entry.hashtag.as_str()).or_default().push(entry);
            }
            for (tag, mut entries) in by_tag {
                entries.sort_by_key(|e| e.start_bin);
                for pair in entries.windows(2) {
                    if pair[1].start_bin < pair[0].end_bin {
                        return fail(format!(
                            "schedule intervals {}..{} and {}..{} overlap for '{tag}'",
                            pair[0].start_bin,
                            pair[0].end_bin,
                            pair[1].start_bin,
                            pair[1].end_bin
                        ));
                    }
                }
            }
        }
        // Any cap is fine, including 0 (an empty head).
        SamplerConfig::RateCapHead { .. } => {}
    }
    Ok(())
}

/// Everything needed to score a detector against the planted truth.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub firehose: Vec<TweetRecord>,
    /// One thinned stream per configured sampler, in order.
    pub streams: Vec<Vec<TweetRecord>>,
    /// Union over samplers of the bins each hashtag was distorted in.
    pub biased_bins: BTreeMap<String, BTreeSet<usize>>,
    /// The |gain − 1| threshold the bins were flagged at.
    pub delta: f64,
}

/// Normalized Zipf weights for `n` ranks: w_r ∝ 1/(r+1)^exponent.
pub fn zipf_weights(n: usize, exponent: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|rank| 1.0 / ((rank + 1) as f64).powf(exponent))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Generates the full synthetic firehose for a scenario.
///
/// Each (bin, hashtag) cell draws a Poisson count at rate
/// `base_rate · weight · spike multipliers`, then places each tweet
/// uniformly inside the bin. Records are sorted by timestamp (ties keep
/// draw order) and numbered sequentially, so IDs ascend with time.
pub fn generate_firehose(scenario: &Scenario) -> Result<Vec<TweetRecord>> {
    scenario.validate()?;
    let geometry = scenario.geometry();
    let weights = zipf_weights(scenario.n_hashtags, scenario.zipf_exponent);

    // Per-hashtag per-bin spike multiplier, only materialized where spikes exist.
    let mut spike_mult: HashMap<usize, Vec<f64>> = HashMap::new();
    for spike in &scenario.spikes {
        let rank = spike.hashtag[1..]
            .parse::<usize>()
            .expect("validated hashtag name");
        let per_bin = spike_mult
            .entry(rank)
            .or_insert_with(|| vec![1.0; scenario.n_bins]);
        for slot in &mut per_bin[spike.start_bin..spike.end_bin] {
            *slot *= spike.multiplier;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(0);
    let mut draws: Vec<(i64, u32)> = Vec::new();
    for bin in 0..scenario.n_bins {
        let lo = geometry.bin_start_ts(bin);
        let hi = lo + scenario.bin_width;
        for (rank, &weight) in weights.iter().enumerate() {
            let multiplier = spike_mult
                .get(&rank)
                .map_or(1.0, |per_bin| per_bin[bin]);
            let lambda = scenario.base_rate * weight * multiplier;
            if lambda <= 0.0 {
                continue;
            }
            let count = Poisson::new(lambda)
                .expect("validated positive rate")
                .sample(&mut rng) as u64;
            for _ in 0..count {
                draws.push((rng.random_range(lo..hi), rank as u32));
            }
        }
    }
    draws.sort_by_key(|&(ts, _)| ts);
    Ok(draws
        .into_iter()
        .enumerate()
        .map(|(id, (ts, rank))| {
            TweetRecord::new(
                id as u64,
                ts,
                [hashtag_name(rank as usize)],
                Source::Firehose,
            )
            .expect("generated hashtags are well-formed")
        })
        .collect())
}

/// Thins `records` through one sampler, returning the kept subsequence and
/// the hashtag → bins map of where the sampler distorted the stream.
///
/// Hashtag → set of bin indices where a sampler distorted the keep rate.
pub type BiasedBins = BTreeMap<String, BTreeSet<usize>>;

/// `Uniform` plants nothing. `BiasSchedule` reports its own entries with
/// `|gain − 1| ≥ bias_delta` — the distortion is known in advance. A
/// `RateCapHead` has no declared plan, so its map is measured from what
/// happened: a (hashtag, bin) cell is biased when its realized keep rate
/// differs from the stream-wide keep rate by the factor threshold.
pub fn apply_sampler(
    records: &[TweetRecord],
    config: &SamplerConfig,
    geometry: BinGeometry,
    bias_delta: f64,
    seed: u64,
) -> Result<(Vec<TweetRecord>, BiasedBins)> {
    validate_sampler(config, geometry.n_bins)?;
    if !bias_delta.is_finite() || bias_delta <= 0.0 {
        return Err(Error::Config {
            field: "bias_delta",
            msg: format!("{bias_delta} is not a positive threshold"),
        });
    }
    let mut biased: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let kept = match config {
        SamplerConfig::Uniform { p } => {
            let coin = Bernoulli::new(*p).expect("validated probability");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            records
                .iter()
                .filter(|_| coin.sample(&mut rng))
                .cloned()
                .collect()
        }
        SamplerConfig::BiasSchedule { p, schedule } => {
            let mut intervals: HashMap<&str, Vec<&ScheduleEntry>> = HashMap::new();
            for entry in schedule {
                intervals.entry(entry.hashtag.as_str()).or_default().push(entry);
                if (entry.gain - 1.0).abs() >= bias_delta {
                    biased
                        .entry(entry.hashtag.clone())
                        .or_default()
                        .extend(entry.start_bin..entry.end_bin);
                }
            }
            let gain_for = |record: &TweetRecord| -> f64 {
                let Some(bin) = geometry.bin_of(record.ts) else {
                    return 1.0;
                };
                record
                    .tags
                    .iter()
                    .flat_map(|tag| intervals.get(tag.as_str()).into_iter().flatten())
                    .filter(|e| (e.start_bin..e.end_bin).contains(&bin))
                    .map(|e| e.gain)
                    .reduce(f64::max)
                    .unwrap_or(1.0)
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            records
                .iter()
                .filter(|record| rng.random::<f64>() < p * gain_for(record))
                .cloned()
                .collect()
        }
        SamplerConfig::RateCapHead { cap } => {
            let mut bin_fill = vec![0u64; geometry.n_bins];
            let mut kept: Vec<TweetRecord> = Vec::new();
            let mut cell_total: HashMap<(&str, usize), u64> = HashMap::new();
            let mut cell_kept: HashMap<(&str, usize), u64> = HashMap::new();
            let (mut total_in, mut kept_in) = (0u64, 0u64);
            for record in records {
                let keep = match geometry.bin_of(record.ts) {
                    None => true,
                    Some(bin) => {
                        total_in += 1;
                        for tag in &record.tags {
                            *cell_total.entry((tag.as_str(), bin)).or_default() += 1;
                        }
                        let fits = bin_fill[bin] < *cap;
                        if fits {
                            bin_fill[bin] += 1;
                            kept_in += 1;
                            for tag in &record.tags {
                                *cell_kept.entry((tag.as_str(), bin)).or_default() += 1;
                            }
                        }
                        fits
                    }
                };
                if keep {
                    kept.push(record.clone());
                }
            }
            if total_in > 0 && kept_in > 0 {
                let global_rate = kept_in as f64 / total_in as f64;
                for (&(tag, bin), &total) in &cell_total {
                    let kept_cell = cell_kept.get(&(tag, bin)).copied().unwrap_or(0);
                    let gain = (kept_cell as f64 / total as f64) / global_rate;
                    if (gain - 1.0).abs() >= bias_delta {
                        biased.entry(tag.to_string()).or_default().insert(bin);
                    }
                }
            }
            kept
        }
    };
    Ok((kept, biased))
}

/// Generates the firehose and every configured stream. Sampler `i` is
/// seeded with `scenario.seed + 1 + i`, so streams are independent of each
/// other and of the generator.
pub fn run_scenario(scenario: &Scenario) -> Result<GroundTruth> {
    scenario.validate()?;
    let firehose = generate_firehose(scenario)?;
    let geometry = scenario.geometry();
    let mut streams = Vec::with_capacity(scenario.samplers.len());
    let mut biased_bins: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for (i, sampler) in scenario.samplers.iter().enumerate() {
        let (stream, biased) = apply_sampler(
            &firehose,
            sampler,
            geometry,
            scenario.bias_delta,
            scenario.seed.wrapping_add(1 + i as u64),
        )?;
        for (tag, bins) in biased {
            biased_bins.entry(tag).or_default().extend(bins);
        }
        streams.push(stream);
    }
    Ok(GroundTruth {
        firehose,
        streams,
        biased_bins,
        delta: scenario.bias_delta,
    })
}
