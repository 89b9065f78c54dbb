//! Error type shared by all analysis modules.

use thiserror::Error;

/// Everything that can go wrong while ingesting records, shaping time series,
/// or running the statistical analyses.
#[derive(Debug, Error)]
pub enum Error {
    /// A record line could not be parsed.
    #[error("{path}:{line}: malformed record: {msg}")]
    MalformedRecord {
        path: String,
        line: usize,
        msg: String,
    },

    /// A record id appeared more than once within one stream file.
    #[error("{path}:{line}: duplicate record id {id}")]
    DuplicateId { path: String, line: usize, id: u64 },

    /// Two series that must share binning do not.
    #[error("bin geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// A scenario or sampler field failed validation.
    #[error("invalid `{field}`: {msg}")]
    Config { field: &'static str, msg: String },

    /// Bootstrap resampling needs at least one occurrence.
    #[error("cannot bootstrap an empty occurrence list")]
    EmptyOccurrences,

    /// An operation over replicates was given too few of them.
    #[error("need at least {needed} replicates, got {got}")]
    TooFewReplicates { needed: usize, got: usize },

    /// Replicates passed to band construction differ in length.
    #[error("replicate length mismatch: expected {expected} bins, found {found}")]
    ReplicateLength { expected: usize, found: usize },

    /// Rank correlation is undefined on fewer than two distinct items.
    #[error("rank correlation undefined: only {comparable} comparable item(s)")]
    InsufficientOverlap { comparable: usize },

    /// Rank correlation is undefined when one ranking is one big tie.
    #[error("rank correlation undefined: ranking `{list}` is completely tied")]
    FullyTied { list: char },

    /// An item occurred twice within a single ranking.
    #[error("ranking `{list}` lists item {item:?} more than once")]
    DuplicateItem { list: char, item: String },

    /// A without-replacement draw asked for more records than exist.
    #[error("sample size {requested} exceeds population {available}")]
    SampleTooLarge {
        requested: usize,
        available: usize,
    },

    /// A window scheme with zero windows was supplied.
    #[error("window scheme has no windows")]
    NoWindows,

    /// Between-time comparison requires at least two windows.
    #[error("need at least 2 windows, got {0}")]
    TooFewWindows(usize),

    /// Between-time comparison requires consecutive windows to overlap.
    #[error("windows do not overlap: duration {duration}s <= period {period}s")]
    NoOverlap { duration: i64, period: i64 },

    /// The number of windowed record sequences does not match the scheme.
    #[error("expected {expected} windowed streams, found {found}")]
    WindowCount { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
