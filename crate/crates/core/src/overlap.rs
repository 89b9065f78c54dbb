//! Jaccard overlap of record-ID sets across sliding windows: how stable a
//! sampled stream is against a second stream, or against itself over time.

use std::collections::HashSet;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::ingest::TweetRecord;

/// A train of possibly overlapping windows: window `i` covers
/// `[start_ts + i·period, start_ts + i·period + duration)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowScheme {
    pub start_ts: i64,
    pub period: i64,
    pub duration: i64,
    pub n_windows: usize,
}

impl WindowScheme {
    /// Start timestamp of window `i`.
    pub fn window_start(&self, i: usize) -> i64 {
        self.start_ts + i as i64 * self.period
    }

    /// Half-open bounds of window `i`.
    pub fn window_bounds(&self, i: usize) -> (i64, i64) {
        let start = self.window_start(i);
        (start, start + self.duration)
    }
}

/// Distribution of Jaccard indices over a set of window comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct JaccardSummary {
    pub n_comparisons: usize,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
}

/// Jaccard index |A∩B| / |A∪B|; two empty sets count as identical (1.0).
pub fn jaccard<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let intersection = small.iter().filter(|item| large.contains(*item)).count();
    let union = a.len() + b.len() - intersection;
    intersection as f64 / union as f64
}

/// IDs of the records falling inside `[lo, hi)`.
fn ids_in_range(records: &[TweetRecord], lo: i64, hi: i64) -> HashSet<u64> {
    records
        .iter()
        .filter(|r| r.ts >= lo && r.ts < hi)
        .map(|r| r.id)
        .collect()
}

/// Window-by-window overlap between two streams: one Jaccard comparison of
/// full window ID sets per window.
pub fn between_source_summary(
    a: &[TweetRecord],
    b: &[TweetRecord],
    scheme: &WindowScheme,
) -> Result<JaccardSummary> {
    if scheme.n_windows == 0 {
        return Err(Error::NoWindows);
    }
    let values: Vec<f64> = (0..scheme.n_windows)
        .map(|i| {
            let (lo, hi) = scheme.window_bounds(i);
            jaccard(&ids_in_range(a, lo, hi), &ids_in_range(b, lo, hi))
        })
        .collect();
    Ok(summarize(values))
}

/// Overlap of one stream with itself across time: adjacent windows are
/// compared on their shared span only, so a comparison measures churn in
/// what both windows could have seen. `windows[i]` holds the records
/// retrieved for window `i`; there is one comparison per adjacent pair.
pub fn between_time_summary(
    windows: &[Vec<TweetRecord>],
    scheme: &WindowScheme,
) -> Result<JaccardSummary> {
    if scheme.duration <= scheme.period {
        return Err(Error::NoOverlap {
            duration: scheme.duration,
            period: scheme.period,
        });
    }
    if scheme.n_windows < 2 {
        return Err(Error::TooFewWindows(scheme.n_windows));
    }
    if windows.len() != scheme.n_windows {
        return Err(Error::WindowCount {
            expected: scheme.n_windows,
            found: windows.len(),
        });
    }
    let values: Vec<f64> = (0..scheme.n_windows - 1)
        .map(|i| {
            // Shared span of windows i and i+1.
            let lo = scheme.window_start(i + 1);
            let hi = scheme.window_start(i) + scheme.duration;
            jaccard(
                &ids_in_range(&windows[i], lo, hi),
                &ids_in_range(&windows[i + 1], lo, hi),
            )
        })
        .collect();
    Ok(summarize(values))
}

/// Median, mean, and population standard deviation of the comparisons.
fn summarize(mut values: Vec<f64>) -> JaccardSummary {
    let n = values.len();
    values.sort_unstable_by(|x, y| x.partial_cmp(y).expect("Jaccard values are never NaN"));
    let median = if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    };
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    JaccardSummary {
        n_comparisons: n,
        median,
        mean,
        std: var.sqrt(),
    }
}
