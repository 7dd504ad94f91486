//! Sentence deduplication keyed by a 64-bit FNV-1a hash.

use std::collections::HashMap;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DedupReport {
    pub kept: usize,
    pub dropped: usize,
}

/// Streaming deduplicator; the first occurrence of each line wins.
///
/// Equal hashes are confirmed against the stored strings, so a collision
/// never drops a distinct line.
#[derive(Debug, Default)]
pub struct Deduplicator {
    seen: HashMap<u64, Vec<String>>,
    report: DedupReport,
}

impl Deduplicator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true if `line` is new and should be kept.
    pub fn insert(&mut self, line: &str) -> bool {
        self.insert_hashed(fnv1a64(line.as_bytes()), line)
    }

    fn insert_hashed(&mut self, hash: u64, line: &str) -> bool {
        let bucket = self.seen.entry(hash).or_default();
        if bucket.iter().any(|s| s == line) {
            self.report.dropped += 1;
            false
        } else {
            bucket.push(line.to_string());
            self.report.kept += 1;
            true
        }
    }

    pub fn report(&self) -> DedupReport {
        self.report
    }
}

/// Keeps the first occurrence of every line.
pub fn dedup_sentences<I, S>(lines: I) -> (Vec<String>, DedupReport)
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut d = Deduplicator::new();
    let kept = lines
        .into_iter()
        .filter(|l| d.insert(l.as_ref()))
        .map(|l| l.as_ref().to_string())
        .collect();
    (kept, d.report())
}
