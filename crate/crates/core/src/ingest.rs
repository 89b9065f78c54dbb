//! Record ingestion: newline-delimited record files, in-memory validation,
//! and the hashtag occurrence index every downstream analysis is built on.
//!
//! The wire format is one JSON object per line with exactly three keys:
//! `id` (non-negative integer), `ts` (epoch seconds), `tags` (array of
//! strings). Hashtags are lowercased on ingestion and deduplicated; which
//! feed a record came from is attached by the caller as a [`Source`] label.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which feed a record was observed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    /// The query-filtered feed under suspicion of bias.
    Streaming,
    /// The uniform reference feed.
    Sample,
    /// The complete stream (synthetic ground truth).
    Firehose,
}

/// One observed message.
///
/// `tags` is kept sorted and deduplicated, every tag lowercase and non-empty;
/// [`TweetRecord::new`] and [`parse_reader`] enforce this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub id: u64,
    pub ts: i64,
    pub tags: Vec<String>,
    pub source: Source,
}

/// Serialized shape of a record line; `source` is deliberately not part of
/// the wire format.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: u64,
    ts: i64,
    tags: Vec<String>,
}

#[derive(Serialize)]
struct RawRecordRef<'a> {
    id: u64,
    ts: i64,
    tags: &'a [String],
}

impl TweetRecord {
    /// Builds a record, normalizing tags (lowercase, sorted, deduplicated).
    ///
    /// Returns `None` if any tag is empty after normalization; file-level
    /// parsing maps that to a malformed-record error with line context.
    pub fn new(
        id: u64,
        ts: i64,
        tags: impl IntoIterator<Item = String>,
        source: Source,
    ) -> Option<Self> {
        let mut tags: Vec<String> = tags.into_iter().map(|t| t.to_lowercase()).collect();
        if tags.iter().any(String::is_empty) {
            return None;
        }
        tags.sort_unstable();
        tags.dedup();
        Some(TweetRecord {
            id,
            ts,
            tags,
            source,
        })
    }
}

/// Parses a record file. See [`parse_reader`].
pub fn parse_stream(path: impl AsRef<Path>, source: Source) -> Result<Vec<TweetRecord>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_reader(BufReader::new(file), &path.to_string_lossy(), source)
}

/// Parses newline-delimited records from any reader.
///
/// Records come back in file order with hashtags lowercased; a duplicate id
/// or a malformed line aborts with the offending line number. An empty input
/// yields an empty sequence.
pub fn parse_reader(
    reader: impl BufRead,
    path_label: &str,
    source: Source,
) -> Result<Vec<TweetRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                path: path_label.to_string(),
                line: line_no,
                msg: e.to_string(),
            })?;
        if !seen.insert(raw.id) {
            return Err(Error::DuplicateId {
                path: path_label.to_string(),
                line: line_no,
                id: raw.id,
            });
        }
        let record =
            TweetRecord::new(raw.id, raw.ts, raw.tags, source).ok_or(Error::MalformedRecord {
                path: path_label.to_string(),
                line: line_no,
                msg: "empty hashtag".to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

/// Writes records in the newline-delimited wire format (the inverse of
/// [`parse_reader`]; `source` labels are not serialized).
pub fn write_ndjson(records: &[TweetRecord], mut writer: impl Write) -> Result<()> {
    for record in records {
        let raw = RawRecordRef {
            id: record.id,
            ts: record.ts,
            tags: &record.tags,
        };
        serde_json::to_writer(&mut writer, &raw).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Hashtag → occurrence index over one record sequence.
///
/// Each hashtag maps to its `(id, ts)` occurrences sorted by timestamp
/// (ties by id); a record with k tags appears under k keys, and records
/// without tags count toward `total_records` only.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HashtagIndex {
    map: BTreeMap<String, Vec<(u64, i64)>>,
    total_records: usize,
}

impl HashtagIndex {
    /// Occurrences of one hashtag, or `None` if it never appears.
    pub fn occurrences(&self, hashtag: &str) -> Option<&[(u64, i64)]> {
        self.map.get(hashtag).map(Vec::as_slice)
    }

    /// Number of records indexed, including records without tags.
    pub fn total_records(&self) -> usize {
        self.total_records
    }

    /// Number of distinct hashtags.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Hashtags with their occurrence lists, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[(u64, i64)])> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// Indexes a record sequence by hashtag.
pub fn build_index(records: &[TweetRecord]) -> HashtagIndex {
    let mut map: BTreeMap<String, Vec<(u64, i64)>> = BTreeMap::new();
    for record in records {
        for tag in &record.tags {
            map.entry(tag.clone()).or_default().push((record.id, record.ts));
        }
    }
    for occurrences in map.values_mut() {
        occurrences.sort_unstable_by_key(|&(id, ts)| (ts, id));
    }
    HashtagIndex {
        map,
        total_records: records.len(),
    }
}

/// The `k` most frequent hashtags as `(hashtag, count)`, most frequent first.
///
/// Equal counts are broken lexicographically so rankings are reproducible;
/// the result is shorter than `k` when fewer hashtags exist.
pub fn top_k_hashtags(index: &HashtagIndex, k: usize) -> Vec<(String, u64)> {
    let mut ranked: Vec<(String, u64)> = index
        .map
        .iter()
        .map(|(tag, occurrences)| (tag.clone(), occurrences.len() as u64))
        .collect();
    // BTreeMap iteration is already lexicographic, so a stable sort on the
    // count alone preserves the tie-break.
    ranked.sort_by_key(|entry| std::cmp::Reverse(entry.1));
    ranked.truncate(k);
    ranked
}
