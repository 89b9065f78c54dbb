//! Per-bin bias verdicts: comparing a streaming trend against the
//! bootstrap band of the reference sample's trend.

use crate::error::{Error, Result};
use crate::stats::bootstrap::{bootstrap_replicates, build_band, BandParams, BootstrapBand};
use crate::timeseries::{known_zero_bins, standard_score, TimeSeries};

/// Guards against a zero-width band when replicates happen to agree exactly
/// in some bin; the comparison then still needs a finite margin.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Classification of one time bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Streaming trend inside the band.
    Unbiased,
    /// Streaming trend above the band: the filtered stream exaggerates
    /// the hashtag here.
    OverRepresented,
    /// Streaming trend below the band: the filtered stream suppresses
    /// the hashtag here.
    UnderRepresented,
    /// No basis for comparison: the streaming feed saw the hashtag while
    /// the sample saw nothing, or the sample series carries no trend at all.
    NoData,
}

impl Verdict {
    /// Stable uppercase label used in CSV output.
    pub fn csv_label(&self) -> &'static str {
        match self {
            Verdict::Unbiased => "UNBIASED",
            Verdict::OverRepresented => "OVER",
            Verdict::UnderRepresented => "UNDER",
            Verdict::NoData => "NODATA",
        }
    }
}

/// Full result of a bias scan for one hashtag.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasReport {
    pub hashtag: String,
    pub verdicts: Vec<Verdict>,
    pub band: BootstrapBand,
    pub streaming_z: Vec<f64>,
}

/// Flags bins where the streaming series' normalized trend leaves the
/// bootstrap band built from the reference sample series.
///
/// Both series must share bin geometry. A degenerate sample series (no
/// variance, including an absent hashtag) supports no comparison: every bin
/// is `NoData` and the band is empty. Otherwise the sample's occurrence
/// multiset is resampled into a band, and each bin is classified by where
/// the streaming z-score falls relative to `mu_b ± multiplier · sigma_b`;
/// bins the streaming feed saw but the sample missed are `NoData`.
pub fn detect_bias(
    streaming: &TimeSeries,
    sample: &TimeSeries,
    params: &BandParams,
) -> Result<BiasReport> {
    if streaming.hashtag != sample.hashtag {
        return Err(Error::Config {
            field: "hashtag",
            msg: format!(
                "streaming series is for '{}' but sample series is for '{}'",
                streaming.hashtag, sample.hashtag
            ),
        });
    }
    let known_zeros = known_zero_bins(streaming, sample)?;
    let geometry = sample.geometry();
    let n_bins = geometry.n_bins;

    let streaming_norm = standard_score(streaming);
    let sample_norm = standard_score(sample);

    if sample_norm.degenerate {
        return Ok(BiasReport {
            hashtag: streaming.hashtag.clone(),
            verdicts: vec![Verdict::NoData; n_bins],
            band: BootstrapBand {
                n_replicates: 0,
                mu_b: vec![0.0; n_bins],
                sigma_b: vec![0.0; n_bins],
                sigma_multiplier: params.sigma_multiplier,
            },
            streaming_z: streaming_norm.z,
        });
    }

    // The band resamples the sample's occurrence multiset. Binned counts
    // are a lossless stand-in for the in-window occurrences: resampling
    // bin-start timestamps bins identically to resampling raw timestamps.
    let mut occurrences = Vec::with_capacity(sample.counts.iter().sum::<u64>() as usize);
    for (bin, &count) in sample.counts.iter().enumerate() {
        let ts = geometry.bin_start_ts(bin);
        occurrences.extend(std::iter::repeat(ts).take(count as usize));
    }
    let replicates =
        bootstrap_replicates(&occurrences, params.n_replicates, geometry, params.seed)?;
    let band = build_band(&replicates, params.sigma_multiplier)?;

    let verdicts = (0..n_bins)
        .map(|bin| {
            if known_zeros.contains(&bin) {
                return Verdict::NoData;
            }
            let margin = params.sigma_multiplier * band.sigma_b[bin].max(SIGMA_FLOOR);
            let z = streaming_norm.z[bin];
            if z > band.mu_b[bin] + margin {
                Verdict::OverRepresented
            } else if z < band.mu_b[bin] - margin {
                Verdict::UnderRepresented
            } else {
                Verdict::Unbiased
            }
        })
        .collect();

    Ok(BiasReport {
        hashtag: streaming.hashtag.clone(),
        verdicts,
        band,
        streaming_z: streaming_norm.z,
    })
}
