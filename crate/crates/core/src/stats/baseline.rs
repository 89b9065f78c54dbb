//! How much ranking agreement is lost to sampling alone: repeated uniform
//! subsamples of a firehose, each compared to the full ranking at several
//! depths.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::TweetRecord;
use crate::stats::kendall::kendall_tau_b;

/// τ distribution at one ranking depth across the random draws.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselinePoint {
    pub k: usize,
    pub tau_mean: f64,
    pub tau_std: f64,
}

/// Ranked `(hashtag, count)` pairs: count descending, ties alphabetical.
fn ranked_counts<'r, I>(records: I) -> Vec<(&'r str, u64)>
where
    I: Iterator<Item = &'r TweetRecord>,
{
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for record in records {
        for tag in &record.tags {
            *counts.entry(tag.as_str()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
}

fn prefix(ranking: &[(&str, u64)], k: usize) -> Vec<(String, u64)> {
    ranking
        .iter()
        .take(k)
        .map(|&(tag, count)| (tag.to_string(), count))
        .collect()
}

/// Draws `n_draws` uniform subsamples of `sample_size` records without
/// replacement and measures, at each depth in `k_grid`, the τ-b between the
/// full ranking's top-k and the subsample's top-k.
///
/// Draw `d` uses substream `d` of one seeded generator. Standard deviations
/// are over the draws (population form, so one draw reports exactly zero).
pub fn random_sample_baseline(
    firehose: &[TweetRecord],
    sample_size: usize,
    n_draws: usize,
    k_grid: &[usize],
    seed: u64,
) -> Result<Vec<BaselinePoint>> {
    if sample_size > firehose.len() {
        return Err(Error::SampleTooLarge {
            requested: sample_size,
            available: firehose.len(),
        });
    }
    if n_draws == 0 {
        return Err(Error::Config {
            field: "n_draws",
            msg: "at least one draw is required".to_string(),
        });
    }
    if let Some(&bad) = k_grid.iter().find(|&&k| k == 0) {
        return Err(Error::Config {
            field: "k_grid",
            msg: format!("depth {bad} is not a valid ranking depth"),
        });
    }

    let full_ranking = ranked_counts(firehose.iter());
    let mut taus: Vec<Vec<f64>> = vec![Vec::with_capacity(n_draws); k_grid.len()];

    for draw in 0..n_draws {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(draw as u64);
        let chosen = rand::seq::index::sample(&mut rng, firehose.len(), sample_size);
        let draw_ranking = ranked_counts(chosen.iter().map(|i| &firehose[i]));
        for (slot, &k) in taus.iter_mut().zip(k_grid) {
            let result = kendall_tau_b(&prefix(&full_ranking, k), &prefix(&draw_ranking, k))?;
            slot.push(result.tau_b);
        }
    }

    Ok(k_grid
        .iter()
        .zip(&taus)
        .map(|(&k, tau_values)| {
            let n = tau_values.len() as f64;
            let mean = tau_values.iter().sum::<f64>() / n;
            let var = tau_values.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
            BaselinePoint {
                k,
                tau_mean: mean,
                tau_std: var.sqrt(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Source;

    /// Synthetic firehose where hashtag `g{i}` appears `(n_tags − i)³`
    /// times: huge gaps between head ranks, tiny gaps in the tail.
    fn graded_firehose(n_tags: usize) -> Vec<TweetRecord> {
        let mut records = Vec::new();
        let mut id = 0u64;
        for tag_index in 0..n_tags {
            for _ in 0..(n_tags - tag_index).pow(3) {
                records.push(
                    TweetRecord::new(
                        id,
                        id as i64,
                        [format!("g{tag_index:03}")],
                        Source::Firehose,
                    )
                    .unwrap(),
                );
                id += 1;
            }
        }
        records
    }

    #[test]
    fn oversized_sample_is_rejected() {
        let firehose = graded_firehose(3);
        let err =
            random_sample_baseline(&firehose, firehose.len() + 1, 2, &[2], 0).unwrap_err();
        assert!(matches!(err, Error::SampleTooLarge { .. }));
    }

    #[test]
    fn zero_draws_is_rejected() {
        let firehose = graded_firehose(3);
        assert!(matches!(
            random_sample_baseline(&firehose, 5, 0, &[2], 0).unwrap_err(),
            Error::Config { field: "n_draws", .. }
        ));
    }

    #[test]
    fn zero_depth_is_rejected() {
        let firehose = graded_firehose(3);
        assert!(matches!(
            random_sample_baseline(&firehose, 5, 1, &[2, 0], 0).unwrap_err(),
            Error::Config { field: "k_grid", .. }
        ));
    }

    #[test]
    fn full_population_sample_agrees_perfectly() {
        // Sampling every record reproduces the ranking exactly: τ = 1.
        let firehose = graded_firehose(6);
        let points =
            random_sample_baseline(&firehose, firehose.len(), 3, &[3, 6], 0).unwrap();
        for point in &points {
            assert_eq!(point.tau_mean, 1.0);
            assert_eq!(point.tau_std, 0.0);
        }
    }

    #[test]
    fn single_draw_has_zero_std() {
        let firehose = graded_firehose(8);
        let points = random_sample_baseline(&firehose, 60, 1, &[4], 9).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].k, 4);
        assert_eq!(points[0].tau_std, 0.0);
    }

    #[test]
    fn deterministic_in_seed() {
        let firehose = graded_firehose(10);
        let a = random_sample_baseline(&firehose, 100, 5, &[3, 5, 10], 11).unwrap();
        let b = random_sample_baseline(&firehose, 100, 5, &[3, 5, 10], 11).unwrap();
        assert_eq!(a, b);
        let c = random_sample_baseline(&firehose, 100, 5, &[3, 5, 10], 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn deeper_rankings_are_harder_to_reproduce() {
        // With a thin sample, agreement at depth 3 should beat depth 20 on
        // average: deep ranks have few occurrences and shuffle freely.
        let firehose = graded_firehose(20);
        let points =
            random_sample_baseline(&firehose, firehose.len() / 10, 40, &[3, 20], 5).unwrap();
        assert!(
            points[0].tau_mean > points[1].tau_mean,
            "expected τ(3) {} > τ(20) {}",
            points[0].tau_mean,
            points[1].tau_mean
        );
    }

    #[test]
    fn tau_values_are_bounded() {
        let firehose = graded_firehose(12);
        let points =
            random_sample_baseline(&firehose, firehose.len() / 4, 10, &[2, 6, 12], 3).unwrap();
        for point in points {
            assert!(point.tau_mean <= 1.0 && point.tau_mean >= -1.0);
            assert!(point.tau_std >= 0.0);
        }
    }
}
