//! Fixed-width binning of hashtag occurrences and standard-score
//! normalization, plus the known-zero sparsity diagnostics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::HashtagIndex;

/// Bin width used throughout when none is given: one hour.
pub const DEFAULT_BIN_WIDTH: i64 = 3600;

/// A fixed grid of half-open time bins `[bin_start + i·w, bin_start + (i+1)·w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinGeometry {
    pub bin_start: i64,
    pub bin_width: i64,
    pub n_bins: usize,
}

impl BinGeometry {
    pub fn new(bin_start: i64, bin_width: i64, n_bins: usize) -> Self {
        assert!(bin_width >= 1, "bin_width must be at least 1 second");
        assert!(n_bins >= 1, "need at least one bin");
        BinGeometry {
            bin_start,
            bin_width,
            n_bins,
        }
    }

    /// Index of the bin containing `ts`, or `None` outside the window.
    pub fn bin_of(&self, ts: i64) -> Option<usize> {
        if ts < self.bin_start {
            return None;
        }
        let idx = (ts - self.bin_start) / self.bin_width;
        (idx < self.n_bins as i64).then_some(idx as usize)
    }

    /// Start timestamp of bin `i`.
    pub fn bin_start_ts(&self, i: usize) -> i64 {
        self.bin_start + i as i64 * self.bin_width
    }
}

/// Binned occurrence counts for one hashtag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeSeries {
    pub hashtag: String,
    pub bin_start: i64,
    pub bin_width: i64,
    pub counts: Vec<u64>,
}

impl TimeSeries {
    pub fn geometry(&self) -> BinGeometry {
        BinGeometry::new(self.bin_start, self.bin_width, self.counts.len())
    }
}

/// A z-scored series together with the statistics it was scored by.
///
/// A constant input has no scale; it comes back as all zeros with
/// `degenerate` set so downstream logic can refuse to compare it.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries {
    pub z: Vec<f64>,
    pub mu: f64,
    pub sigma: f64,
    pub degenerate: bool,
}

/// Bins a hashtag's occurrences onto `geometry`.
///
/// Occurrences outside the window are dropped; a hashtag absent from the
/// index yields an all-zero series.
pub fn bin_counts(index: &HashtagIndex, hashtag: &str, geometry: BinGeometry) -> TimeSeries {
    let mut counts = vec![0u64; geometry.n_bins];
    if let Some(occurrences) = index.occurrences(hashtag) {
        for &(_, ts) in occurrences {
            if let Some(bin) = geometry.bin_of(ts) {
                counts[bin] += 1;
            }
        }
    }
    TimeSeries {
        hashtag: hashtag.to_string(),
        bin_start: geometry.bin_start,
        bin_width: geometry.bin_width,
        counts,
    }
}

/// Z-scores raw values: `z_i = (x_i − μ)/σ` with μ the mean and σ the
/// population standard deviation of the input.
///
/// Exposed separately from [`standard_score`] because bootstrap replicates
/// normalize real-valued resampled counts through the same definition.
pub fn normalize_values(values: &[f64]) -> NormalizedSeries {
    let n = values.len();
    if n == 0 {
        return NormalizedSeries {
            z: Vec::new(),
            mu: 0.0,
            sigma: 0.0,
            degenerate: true,
        };
    }
    let mu = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|&v| (v - mu) * (v - mu)).sum::<f64>() / n as f64;
    let sigma = var.sqrt();
    if sigma == 0.0 {
        return NormalizedSeries {
            z: vec![0.0; n],
            mu,
            sigma: 0.0,
            degenerate: true,
        };
    }
    NormalizedSeries {
        z: values.iter().map(|&v| (v - mu) / sigma).collect(),
        mu,
        sigma,
        degenerate: false,
    }
}

/// Z-scores a binned series (population standard deviation, so a
/// non-degenerate result has mean 0 and variance exactly 1).
pub fn standard_score(series: &TimeSeries) -> NormalizedSeries {
    let values: Vec<f64> = series.counts.iter().map(|&c| c as f64).collect();
    normalize_values(&values)
}

/// Bins where the streaming feed saw the hashtag but the reference sample
/// saw nothing — points where bias is undecidable rather than absent.
pub fn known_zero_bins(streaming: &TimeSeries, sample: &TimeSeries) -> Result<BTreeSet<usize>> {
    if streaming.bin_start != sample.bin_start
        || streaming.bin_width != sample.bin_width
        || streaming.counts.len() != sample.counts.len()
    {
        return Err(Error::GeometryMismatch(format!(
            "streaming (start {}, width {}, {} bins) vs sample (start {}, width {}, {} bins)",
            streaming.bin_start,
            streaming.bin_width,
            streaming.counts.len(),
            sample.bin_start,
            sample.bin_width,
            sample.counts.len()
        )));
    }
    Ok(streaming
        .counts
        .iter()
        .zip(&sample.counts)
        .enumerate()
        .filter(|(_, (&t, &s))| t > 0 && s == 0)
        .map(|(i, _)| i)
        .collect())
}

/// Cumulative known-zero counts down the streaming popularity ranking.
///
/// Entry `r` (1-based rank) is the total number of known-zero bins across the
/// `r` most frequent streaming hashtags; the sequence is non-decreasing by
/// construction. At most `top_n` entries, fewer if the stream has fewer
/// distinct hashtags.
pub fn cumulative_known_zeros(
    streaming_index: &HashtagIndex,
    sample_index: &HashtagIndex,
    top_n: usize,
    geometry: BinGeometry,
) -> Vec<(usize, u64)> {
    let ranked = crate::ingest::top_k_hashtags(streaming_index, top_n);
    let mut cumulative = 0u64;
    ranked
        .iter()
        .enumerate()
        .map(|(i, (hashtag, _))| {
            let streaming = bin_counts(streaming_index, hashtag, geometry);
            let sample = bin_counts(sample_index, hashtag, geometry);
            let zeros = known_zero_bins(&streaming, &sample)
                .expect("series built on one geometry cannot mismatch");
            cumulative += zeros.len() as u64;
            (i + 1, cumulative)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_index, Source, TweetRecord};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn series(counts: &[u64]) -> TimeSeries {
        TimeSeries {
            hashtag: "t".to_string(),
            bin_start: 0,
            bin_width: 60,
            counts: counts.to_vec(),
        }
    }

    fn index_of(ts_list: &[i64]) -> HashtagIndex {
        let records: Vec<TweetRecord> = ts_list
            .iter()
            .enumerate()
            .map(|(i, &ts)| {
                TweetRecord::new(i as u64, ts, ["t".to_string()], Source::Streaming).unwrap()
            })
            .collect();
        build_index(&records)
    }

    #[test]
    fn bins_are_half_open() {
        let index = index_of(&[0, 30, 61]);
        let ts = bin_counts(&index, "t", BinGeometry::new(0, 60, 2));
        assert_eq!(ts.counts, vec![2, 1]);
    }

    #[test]
    fn occurrence_at_window_end_is_dropped() {
        let index = index_of(&[0, 120]);
        let ts = bin_counts(&index, "t", BinGeometry::new(0, 60, 2));
        assert_eq!(ts.counts, vec![1, 0]);
    }

    #[test]
    fn occurrence_before_window_is_dropped() {
        let index = index_of(&[-1, 5]);
        let ts = bin_counts(&index, "t", BinGeometry::new(0, 60, 1));
        assert_eq!(ts.counts, vec![1]);
    }

    #[test]
    fn absent_hashtag_is_all_zero() {
        let index = index_of(&[10]);
        let ts = bin_counts(&index, "other", BinGeometry::new(0, 60, 3));
        assert_eq!(ts.counts, vec![0, 0, 0]);
    }

    #[test]
    fn binning_conserves_in_window_occurrences() {
        let index = index_of(&[0, 1, 59, 60, 119, 200]);
        let ts = bin_counts(&index, "t", BinGeometry::new(0, 60, 2));
        assert_eq!(ts.counts.iter().sum::<u64>(), 5);
    }

    #[test]
    fn two_point_standard_score() {
        let z = standard_score(&series(&[0, 2]));
        assert_eq!(z.z, vec![-1.0, 1.0]);
        assert_eq!(z.mu, 1.0);
        assert_eq!(z.sigma, 1.0);
        assert!(!z.degenerate);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let z = standard_score(&series(&[5, 5, 5]));
        assert_eq!(z.z, vec![0.0, 0.0, 0.0]);
        assert!(z.degenerate);
        assert_eq!(z.sigma, 0.0);
    }

    #[test]
    fn spot_value_against_two_pass_oracle() {
        // counts [1,2,3,6]: μ = 3, population variance = 3.5.
        let z = standard_score(&series(&[1, 2, 3, 6]));
        let expected_z3 = 3.0 / 3.5f64.sqrt();
        assert_abs_diff_eq!(z.z[3], expected_z3, epsilon = 1e-15);
        // Independent two-pass computation over the definition.
        let values = [1.0, 2.0, 3.0, 6.0];
        let mu: f64 = values.iter().sum::<f64>() / 4.0;
        let var: f64 = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / 4.0;
        for (i, &v) in values.iter().enumerate() {
            assert_abs_diff_eq!(z.z[i], (v - mu) / var.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn known_zeros_by_definition() {
        let streaming = series(&[3, 0, 5]);
        let sample = series(&[0, 1, 0]);
        let zeros = known_zero_bins(&streaming, &sample).unwrap();
        assert_eq!(zeros, BTreeSet::from([0, 2]));
    }

    #[test]
    fn known_zeros_need_streaming_presence() {
        // Sample everywhere positive → none; both-zero bins excluded too.
        let everywhere = known_zero_bins(&series(&[1, 2]), &series(&[4, 4])).unwrap();
        assert!(everywhere.is_empty());
        let both_zero = known_zero_bins(&series(&[0, 1]), &series(&[0, 0])).unwrap();
        assert_eq!(both_zero, BTreeSet::from([1]));
    }

    #[test]
    fn known_zeros_reject_geometry_mismatch() {
        let err = known_zero_bins(&series(&[1, 2]), &series(&[1, 2, 3])).unwrap_err();
        assert!(matches!(err, Error::GeometryMismatch(_)));
    }

    #[test]
    fn cumulative_zeros_accumulate_down_the_ranking() {
        // Streaming: a (count 3, zeros in 2 bins), b (count 2, zero in 1 bin).
        let streaming_records = vec![
            TweetRecord::new(1, 10, ["a".to_string()], Source::Streaming).unwrap(),
            TweetRecord::new(2, 70, ["a".to_string()], Source::Streaming).unwrap(),
            TweetRecord::new(3, 130, ["a".to_string()], Source::Streaming).unwrap(),
            TweetRecord::new(4, 10, ["b".to_string()], Source::Streaming).unwrap(),
            TweetRecord::new(5, 70, ["b".to_string()], Source::Streaming).unwrap(),
        ];
        let sample_records = vec![
            TweetRecord::new(1, 10, ["a".to_string()], Source::Sample).unwrap(),
            TweetRecord::new(2, 70, ["b".to_string()], Source::Sample).unwrap(),
        ];
        let streaming_index = build_index(&streaming_records);
        let sample_index = build_index(&sample_records);
        let geometry = BinGeometry::new(0, 60, 3);
        let curve = cumulative_known_zeros(&streaming_index, &sample_index, 5, geometry);
        // a: sample [1,0,0] vs streaming [1,1,1] → zeros at bins 1,2.
        // b: sample [0,1,0] vs streaming [1,1,0] → zero at bin 0.
        assert_eq!(curve, vec![(1, 2), (2, 3)]);
    }

    #[test]
    fn one_hashtag_no_zeros() {
        let records =
            vec![TweetRecord::new(1, 10, ["a".to_string()], Source::Streaming).unwrap()];
        let index = build_index(&records);
        let curve = cumulative_known_zeros(&index, &index, 1, BinGeometry::new(0, 60, 1));
        assert_eq!(curve, vec![(1, 0)]);
    }

    proptest! {
        /// Affine rescaling a·x + b (a > 0) must not change the z-scores.
        #[test]
        fn shift_scale_invariance(
            values in proptest::collection::vec(-1000.0f64..1000.0, 2..40),
            a in 0.001f64..1000.0,
            b in -1000.0f64..1000.0,
        ) {
            let base = normalize_values(&values);
            let scaled: Vec<f64> = values.iter().map(|&v| a * v + b).collect();
            let transformed = normalize_values(&scaled);
            prop_assert_eq!(base.degenerate, transformed.degenerate);
            if !base.degenerate {
                for (x, y) in base.z.iter().zip(&transformed.z) {
                    prop_assert!((x - y).abs() < 1e-9, "z drifted: {} vs {}", x, y);
                }
            }
        }

        /// A non-degenerate normalization has mean 0 and population std 1.
        #[test]
        fn normalized_moments(counts in proptest::collection::vec(0u64..500, 2..60)) {
            let z = standard_score(&series(&counts));
            if !z.degenerate {
                let n = z.z.len() as f64;
                let mean = z.z.iter().sum::<f64>() / n;
                let var = z.z.iter().map(|v| v * v).sum::<f64>() / n;
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
            }
        }

        /// Σ counts equals the number of in-window occurrences.
        #[test]
        fn conservation(ts_list in proptest::collection::vec(-50i64..400, 0..200)) {
            let index = index_of(&ts_list);
            let geometry = BinGeometry::new(0, 60, 5);
            let binned = bin_counts(&index, "t", geometry);
            let in_window = ts_list.iter().filter(|&&ts| (0..300).contains(&ts)).count();
            prop_assert_eq!(binned.counts.iter().sum::<u64>(), in_window as u64);
        }

        /// Cumulative known-zero curves never decrease.
        #[test]
        fn cumulative_monotone(
            streaming_ts in proptest::collection::vec((0u8..6, 0i64..300), 1..80),
            sample_ts in proptest::collection::vec((0u8..6, 0i64..300), 0..80),
        ) {
            let build = |list: &[(u8, i64)], source| {
                let records: Vec<TweetRecord> = list
                    .iter()
                    .enumerate()
                    .map(|(i, &(tag, ts))| {
                        TweetRecord::new(i as u64, ts, [format!("t{tag}")], source).unwrap()
                    })
                    .collect();
                build_index(&records)
            };
            let streaming = build(&streaming_ts, Source::Streaming);
            let sample = build(&sample_ts, Source::Sample);
            let curve =
                cumulative_known_zeros(&streaming, &sample, 6, BinGeometry::new(0, 60, 5));
            for pair in curve.windows(2) {
                prop_assert!(pair[1].1 >= pair[0].1);
            }
        }
    }
}
