//! Kendall τ-b rank correlation between two hashtag popularity rankings,
//! with the tie-corrected normal approximation for significance.
//!
//! Rankings are given as `(item, count)` lists. The universe is the union
//! of both lists; an item missing from one side is treated as ranking
//! below every item that side did include (it was observed less often than
//! anything that made the list), and items with equal counts are tied.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// Result of one τ-b comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCorrelationResult {
    /// Nominal ranking depth: the longer of the two input lists.
    pub k: usize,
    /// Kendall τ-b, tie-adjusted, in [-1, 1].
    pub tau_b: f64,
    /// Two-sided p-value from the tie-corrected normal approximation.
    pub p_value: f64,
    pub n_concordant: u64,
    pub n_discordant: u64,
}

/// Per-side tie bookkeeping: Σ t(t−1), Σ t(t−1)(2t+5), Σ t(t−1)(t−2)
/// over tie groups of size t.
#[derive(Debug, Default, Clone, Copy)]
struct TieSums {
    pairs2: u64,
    weight1: u128,
    weight0: u128,
}

impl TieSums {
    fn add_group(&mut self, t: u64) {
        self.pairs2 += t * (t - 1);
        self.weight1 += (t as u128) * ((t - 1) as u128) * ((2 * t + 5) as u128);
        self.weight0 += (t as u128) * ((t - 1) as u128) * (t.saturating_sub(2) as u128);
    }

    /// Number of tied pairs: Σ t(t−1)/2.
    fn tied_pairs(&self) -> u64 {
        self.pairs2 / 2
    }
}

/// Kendall τ-b between two rankings, O(n log n) via inversion counting.
///
/// Errors when a list repeats an item, when the union holds fewer than two
/// items, or when one side is completely tied (τ-b undefined).
pub fn kendall_tau_b<S: AsRef<str>>(
    a: &[(S, u64)],
    b: &[(S, u64)],
) -> Result<RankCorrelationResult> {
    let a_sorted = sorted_unique(a, 'a')?;
    let b_sorted = sorted_unique(b, 'b')?;

    // Merge the key-sorted lists into per-item score pairs over the union.
    // `None` sorts below every `Some`, which is exactly the absent-item rule.
    let mut pairs: Vec<(Option<u64>, Option<u64>)> =
        Vec::with_capacity(a_sorted.len() + b_sorted.len());
    let (mut i, mut j) = (0, 0);
    while i < a_sorted.len() || j < b_sorted.len() {
        let take_a = j == b_sorted.len()
            || (i < a_sorted.len() && a_sorted[i].0 <= b_sorted[j].0);
        let take_b = i == a_sorted.len()
            || (j < b_sorted.len() && b_sorted[j].0 <= a_sorted[i].0);
        let score_a = take_a.then(|| a_sorted[i].1);
        let score_b = take_b.then(|| b_sorted[j].1);
        i += take_a as usize;
        j += take_b as usize;
        pairs.push((score_a, score_b));
    }

    let n = pairs.len();
    if n < 2 {
        return Err(Error::InsufficientOverlap { comparable: n });
    }

    pairs.sort_unstable();

    // One pass over the (a, b)-sorted pairs collects a-side and joint ties.
    let mut ties_a = TieSums::default();
    let mut joint2 = 0u64;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 == pairs[start].0 {
            end += 1;
        }
        ties_a.add_group((end - start) as u64);
        let mut run = start;
        while run < end {
            let mut stop = run + 1;
            while stop < end && pairs[stop].1 == pairs[run].1 {
                stop += 1;
            }
            let g = (stop - run) as u64;
            joint2 += g * (g - 1);
            run = stop;
        }
        start = end;
    }

    // Discordant pairs are the strict inversions in the b sequence once
    // pairs are ordered by (a, b): a-tied pairs contribute none, and every
    // remaining inversion has a strictly increasing a with decreasing b.
    let mut b_sequence: Vec<Option<u64>> = pairs.iter().map(|&(_, sb)| sb).collect();
    let n_discordant = count_inversions(&mut b_sequence);

    let mut ties_b = TieSums::default();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && b_sequence[end] == b_sequence[start] {
            end += 1;
        }
        ties_b.add_group((end - start) as u64);
        start = end;
    }

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let d1 = n0 - ties_a.tied_pairs();
    let d2 = n0 - ties_b.tied_pairs();
    if d1 == 0 {
        return Err(Error::FullyTied { list: 'a' });
    }
    if d2 == 0 {
        return Err(Error::FullyTied { list: 'b' });
    }

    // Inclusion–exclusion: pairs untied in both lists. Adding the jointly
    // tied pairs first keeps every intermediate value non-negative.
    let comparable = n0 + joint2 / 2 - ties_a.tied_pairs() - ties_b.tied_pairs();
    let n_concordant = comparable - n_discordant;
    let s = n_concordant as i64 - n_discordant as i64;

    let tau_b = s as f64 / ((d1 as f64) * (d2 as f64)).sqrt();
    let p_value = tie_corrected_p(n as u64, s, ties_a, ties_b);

    Ok(RankCorrelationResult {
        k: a.len().max(b.len()),
        tau_b,
        p_value,
        n_concordant,
        n_discordant,
    })
}

/// Two-sided p-value for S under the null, variance corrected for ties.
fn tie_corrected_p(n: u64, s: i64, ties_a: TieSums, ties_b: TieSums) -> f64 {
    let nf = n as f64;
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let vt = ties_a.weight1 as f64;
    let vu = ties_b.weight1 as f64;
    let v1 = (ties_a.pairs2 as f64) * (ties_b.pairs2 as f64) / (2.0 * nf * (nf - 1.0));
    let v2 = if n > 2 {
        (ties_a.weight0 as f64) * (ties_b.weight0 as f64)
            / (9.0 * nf * (nf - 1.0) * (nf - 2.0))
    } else {
        0.0
    };
    let var_s = (v0 - vt - vu) / 18.0 + v1 + v2;
    if var_s <= 0.0 {
        return 1.0;
    }
    let z = s as f64 / var_s.sqrt();
    libm::erfc(z.abs() / SQRT_2)
}

/// Key-sorted copy of one ranking; rejects repeated items.
fn sorted_unique<S: AsRef<str>>(list: &[(S, u64)], label: char) -> Result<Vec<(&str, u64)>> {
    let mut sorted: Vec<(&str, u64)> = list
        .iter()
        .map(|(item, count)| (item.as_ref(), *count))
        .collect();
    sorted.sort_unstable_by(|x, y| x.0.cmp(y.0));
    for window in sorted.windows(2) {
        if window[0].0 == window[1].0 {
            return Err(Error::DuplicateItem {
                list: label,
                item: window[0].0.to_string(),
            });
        }
    }
    Ok(sorted)
}

/// Sorts `values` ascending, returning the number of strict inversions
/// (pairs i < j with values[i] > values[j]). Top-down merge sort.
fn count_inversions<T: Ord + Copy>(values: &mut [T]) -> u64 {
    let mut buffer = values.to_vec();
    merge_count(values, &mut buffer)
}

fn merge_count<T: Ord + Copy>(values: &mut [T], buffer: &mut [T]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inversions = {
        let (left, right) = values.split_at_mut(mid);
        let (buf_left, buf_right) = buffer.split_at_mut(mid);
        merge_count(left, buf_left) + merge_count(right, buf_right)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if values[j] < values[i] {
            inversions += (mid - i) as u64;
            buffer[k] = values[j];
            j += 1;
        } else {
            buffer[k] = values[i];
            i += 1;
        }
        k += 1;
    }
    while i < mid {
        buffer[k] = values[i];
        i += 1;
        k += 1;
    }
    while j < n {
        buffer[k] = values[j];
        j += 1;
        k += 1;
    }
    values.copy_from_slice(&buffer[..n]);
    inversions
}
