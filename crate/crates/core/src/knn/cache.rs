//! On-disk neighborhood cache.
//!
//! One file per (model, k). The first line is a JSON header recording the
//! model name, the SHA-256 of the vector file, `k` and the dimension. Every
//! following line is `query TAB rank TAB neighbor TAB score` with the score
//! printed to nine decimals and ranks starting at 1. Queries whose
//! neighborhood is empty have no lines and are recomputed on demand.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::{Neighbor, NeighborSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub model: String,
    pub digest: String,
    pub k: usize,
    pub dim: usize,
}

/// `<dir>/<model>.k<k>.tsv`
pub fn cache_path(dir: &Path, model_name: &str, k: usize) -> PathBuf {
    dir.join(format!("{model_name}.k{k}.tsv"))
}

/// Writes `sets` atomically (temp file then rename), sorted by query.
pub fn store<T: Scalar>(path: &Path, header: &CacheHeader, sets: &[NeighborSet<T>]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let tmp = path.with_extension(format!("tsv.tmp{}", std::process::id()));
    {
        let file = File::create(&tmp).map_err(|e| Error::file(&tmp, e))?;
        let mut out = BufWriter::new(file);
        let head = serde_json::to_string(header).map_err(|e| Error::Invariant(e.to_string()))?;
        writeln!(out, "{head}")?;
        let mut order: Vec<&NeighborSet<T>> = sets.iter().collect();
        order.sort_by(|a, b| a.query.cmp(&b.query));
        for set in order {
            for (rank, n) in set.entries.iter().enumerate() {
                writeln!(out, "{}\t{}\t{}\t{:.9}", set.query, rank + 1, n.token, n.score)?;
            }
        }
        out.flush()?;
        out.get_ref().sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::file(path, e))?;
    Ok(())
}

/// Reads a cache file and checks it against the expected key.
///
/// A header whose digest, k, model name or dimension differs from `expected`
/// yields [`Error::StaleCache`].
pub fn load<T: Scalar>(path: &Path, expected: &CacheHeader) -> Result<BTreeMap<String, NeighborSet<T>>> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let head = match lines.next() {
        Some(l) => l?,
        None => return Err(Error::EmptyInput),
    };
    let header: CacheHeader = serde_json::from_str(&head).map_err(|e| Error::parse(1, format!("cache header: {e}")))?;
    if header != *expected {
        let reason = if header.digest != expected.digest {
            format!("digest {} does not match {}", header.digest, expected.digest)
        } else {
            format!("header {head} does not match the requested key")
        };
        return Err(Error::StaleCache {
            path: path.to_path_buf(),
            reason,
        });
    }

    let mut sets: BTreeMap<String, NeighborSet<T>> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        let fields: Vec<&str> = line.split('\t').collect();
        let [query, rank, token, score] = fields[..] else {
            return Err(Error::parse(
                lineno,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        };
        let rank: usize = rank
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid rank {rank:?}")))?;
        let score: T = score
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid score {score:?}")))?;
        let set = sets.entry(query.to_string()).or_insert_with(|| NeighborSet {
            query: query.to_string(),
            k_requested: header.k,
            model_name: header.model.clone(),
            entries: Vec::new(),
        });
        if rank != set.entries.len() + 1 || rank > header.k {
            return Err(Error::parse(
                lineno,
                format!("rank {rank} out of sequence for {query:?}"),
            ));
        }
        set.entries.push(Neighbor {
            token: token.to_string(),
            score,
        });
    }
    Ok(sets)
}
