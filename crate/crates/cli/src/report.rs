//! CSV rendering for every report. All writers buffer into memory so a
//! report is either written whole or not at all, and reruns are
//! byte-identical.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

use streambias_core::{
    BaselinePoint, BiasReport, JaccardSummary, NormalizedSeries, RankCorrelationResult,
    TimeSeries,
};

/// Shortest round-trip decimal form; deterministic for any finite f64.
fn num(value: f64) -> String {
    format!("{value}")
}

fn into_bytes(writer: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    writer.into_inner().context("flushing CSV buffer")
}

/// `bin_index,streaming_z,band_mu,band_sigma,verdict` — one row per bin.
pub fn bias_csv(report: &BiasReport) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["bin_index", "streaming_z", "band_mu", "band_sigma", "verdict"])?;
    for (bin, verdict) in report.verdicts.iter().enumerate() {
        writer.write_record([
            bin.to_string(),
            num(report.streaming_z[bin]),
            num(report.band.mu_b[bin]),
            num(report.band.sigma_b[bin]),
            verdict.csv_label().to_string(),
        ])?;
    }
    into_bytes(writer)
}

/// `k,tau_b,p_value` — one row per grid depth.
pub fn rankcorr_csv(rows: &[RankCorrelationResult]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["k", "tau_b", "p_value"])?;
    for row in rows {
        writer.write_record([row.k.to_string(), num(row.tau_b), num(row.p_value)])?;
    }
    into_bytes(writer)
}

/// `rank,cumulative_known_zeros` — the sparsity curve down the ranking.
pub fn zeros_csv(curve: &[(usize, u64)]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["rank", "cumulative_known_zeros"])?;
    for &(rank, zeros) in curve {
        writer.write_record([rank.to_string(), zeros.to_string()])?;
    }
    into_bytes(writer)
}

/// `comparison,n,median,mean,std` — one summary row.
pub fn overlap_csv(comparison: &str, summary: &JaccardSummary) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["comparison", "n", "median", "mean", "std"])?;
    writer.write_record([
        comparison.to_string(),
        summary.n_comparisons.to_string(),
        num(summary.median),
        num(summary.mean),
        num(summary.std),
    ])?;
    into_bytes(writer)
}

/// `k,tau_mean,tau_std` — one row per grid depth.
pub fn baseline_csv(points: &[BaselinePoint]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["k", "tau_mean", "tau_std"])?;
    for point in points {
        writer.write_record([
            point.k.to_string(),
            num(point.tau_mean),
            num(point.tau_std),
        ])?;
    }
    into_bytes(writer)
}

/// `bin_index,bin_start_ts,count,z` — one row per bin; the z column is
/// left empty when no usable normalization accompanies the series.
pub fn series_csv(series: &TimeSeries, normalized: Option<&NormalizedSeries>) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["bin_index", "bin_start_ts", "count", "z"])?;
    let geometry = series.geometry();
    for (bin, &count) in series.counts.iter().enumerate() {
        let z = match normalized {
            Some(norm) if !norm.degenerate => num(norm.z[bin]),
            _ => String::new(),
        };
        writer.write_record([
            bin.to_string(),
            geometry.bin_start_ts(bin).to_string(),
            count.to_string(),
            z,
        ])?;
    }
    into_bytes(writer)
}

/// Writes the finished report to `path`, or stdout when none was given.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, bytes)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
