//! Bootstrap resampling of a reference sample's occurrence stream into a
//! band of plausible normalized trends.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::timeseries::{normalize_values, BinGeometry};

/// Controls for band construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandParams {
    pub n_replicates: usize,
    pub sigma_multiplier: f64,
    pub seed: u64,
}

impl Default for BandParams {
    fn default() -> Self {
        BandParams {
            n_replicates: 100,
            sigma_multiplier: 3.0,
            seed: 0,
        }
    }
}

/// Per-bin envelope of the resampled normalized trends: the streaming trend
/// is compared against `mu_b ± sigma_multiplier · sigma_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapBand {
    pub n_replicates: usize,
    pub mu_b: Vec<f64>,
    pub sigma_b: Vec<f64>,
    pub sigma_multiplier: f64,
}

/// Resamples the occurrence multiset with replacement `n_replicates` times.
///
/// Each replicate draws `occurrences.len()` timestamps uniformly with
/// replacement, bins them on `geometry`, and z-scores the binned counts by
/// the replicate's own mean and population standard deviation. Replicate
/// `r` uses an independent substream of one seeded generator, so any
/// replicate can be reproduced without drawing its predecessors.
pub fn bootstrap_replicates(
    occurrences: &[i64],
    n_replicates: usize,
    geometry: BinGeometry,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if occurrences.is_empty() {
        return Err(Error::EmptyOccurrences);
    }
    let mut replicates = Vec::with_capacity(n_replicates);
    let mut counts = vec![0f64; geometry.n_bins];
    for replicate in 0..n_replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replicate as u64);
        counts.fill(0.0);
        for _ in 0..occurrences.len() {
            let ts = occurrences[rng.random_range(0..occurrences.len())];
            if let Some(bin) = geometry.bin_of(ts) {
                counts[bin] += 1.0;
            }
        }
        replicates.push(normalize_values(&counts).z);
    }
    Ok(replicates)
}

/// Collapses replicates into a per-bin band: `mu_b` the mean and `sigma_b`
/// the sample standard deviation across replicates.
pub fn build_band(replicates: &[Vec<f64>], sigma_multiplier: f64) -> Result<BootstrapBand> {
    if replicates.len() < 2 {
        return Err(Error::TooFewReplicates {
            needed: 2,
            got: replicates.len(),
        });
    }
    let n_bins = replicates[0].len();
    for replicate in replicates {
        if replicate.len() != n_bins {
            return Err(Error::ReplicateLength {
                expected: n_bins,
                found: replicate.len(),
            });
        }
    }
    let n = replicates.len() as f64;
    let mut mu_b = vec![0.0; n_bins];
    for replicate in replicates {
        for (sum, &z) in mu_b.iter_mut().zip(replicate) {
            *sum += z;
        }
    }
    for sum in &mut mu_b {
        *sum /= n;
    }
    let mut sigma_b = vec![0.0; n_bins];
    for replicate in replicates {
        for ((acc, &mu), &z) in sigma_b.iter_mut().zip(&mu_b).zip(replicate) {
            *acc += (z - mu) * (z - mu);
        }
    }
    for acc in &mut sigma_b {
        *acc = (*acc / (n - 1.0)).sqrt();
    }
    Ok(BootstrapBand {
        n_replicates: replicates.len(),
        mu_b,
        sigma_b,
        sigma_multiplier,
    })
}
