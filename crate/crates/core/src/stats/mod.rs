//! Statistical machinery: rank correlation, bootstrap bands, bias
//! verdicts, and the random-sampling τ baseline.

pub mod baseline;
pub mod bias;
pub mod bootstrap;
pub mod kendall;

pub use baseline::{random_sample_baseline, BaselinePoint};
pub use bias::{detect_bias, BiasReport, Verdict, SIGMA_FLOOR};
pub use bootstrap::{bootstrap_replicates, build_band, BandParams, BootstrapBand};
pub use kendall::{kendall_tau_b, RankCorrelationResult};
