//! Exact top-k cosine neighborhoods.
//!
//! Search is brute force over the whole vocabulary. Scores are computed as
//! `dot(q, r) / (|q| * |r|)` with row norms precomputed once per model, and the
//! k best candidates are kept in a bounded heap. Ordering is by descending
//! score, ties by ascending vocabulary index, so results are fully
//! deterministic and independent of how queries are scheduled.

pub mod cache;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::scalar::{dot, norm, Scalar};

/// Cosine similarity of two equal-length, nonzero vectors.
pub fn cosine<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu.is_zero() || nv.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(dot(u, v) / (nu * nv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor<T> {
    pub token: String,
    pub score: T,
}

/// Ordered top-k neighborhood of one query in one model.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSet<T> {
    pub query: String,
    pub k_requested: usize,
    pub model_name: String,
    pub entries: Vec<Neighbor<T>>,
}

impl<T: Scalar> NeighborSet<T> {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|n| n.token.as_str())
    }

    /// The first `k` entries; valid because smaller neighborhoods are prefixes
    /// of larger ones.
    pub fn truncated(&self, k: usize) -> Self {
        NeighborSet {
            query: self.query.clone(),
            k_requested: k,
            model_name: self.model_name.clone(),
            entries: self.entries.iter().take(k).cloned().collect(),
        }
    }
}

/// Result of a batch query: one set per known query, in input order, and the
/// queries that were not in the vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNeighbors<T> {
    pub sets: Vec<NeighborSet<T>>,
    pub skipped: Vec<String>,
}

/// A model together with its precomputed row norms.
pub struct NeighborIndex<'a, T> {
    model: &'a EmbeddingModel<T>,
    norms: Vec<T>,
}

#[derive(Clone, Copy)]
struct Candidate<T> {
    score: T,
    index: usize,
}

impl<T: Scalar> PartialEq for Candidate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Candidate<T> {}

impl<T: Scalar> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Greater means better: higher score, then lower vocabulary index.
impl<T: Scalar> Ord for Candidate<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .partial_cmp(&other.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl<'a, T: Scalar> NeighborIndex<'a, T> {
    pub fn new(model: &'a EmbeddingModel<T>) -> Self {
        let norms = (0..model.len()).map(|i| norm(model.row(i))).collect();
        NeighborIndex { model, norms }
    }

    pub fn model(&self) -> &'a EmbeddingModel<T> {
        self.model
    }

    /// Exact k nearest neighbors of an in-vocabulary token.
    ///
    /// The query itself and zero rows are never returned. A zero query vector
    /// has no defined cosine and yields an empty set.
    pub fn top_k(&self, query: &str, k: usize) -> Result<NeighborSet<T>> {
        let qi = self
            .model
            .index_of(query)
            .ok_or_else(|| Error::UnknownToken(query.to_string()))?;
        Ok(self.top_k_by_index(qi, k))
    }

    fn top_k_by_index(&self, qi: usize, k: usize) -> NeighborSet<T> {
        let model = self.model;
        let mut entries = Vec::new();
        let qn = self.norms[qi];
        if k > 0 && !qn.is_zero() {
            let q = model.row(qi);
            // Min-heap on quality: the root is the worst retained candidate.
            let mut heap: BinaryHeap<std::cmp::Reverse<Candidate<T>>> = BinaryHeap::with_capacity(k + 1);
            for (i, &rn) in self.norms.iter().enumerate() {
                if i == qi || rn.is_zero() {
                    continue;
                }
                let cand = Candidate {
                    score: dot(q, model.row(i)) / (qn * rn),
                    index: i,
                };
                if heap.len() < k {
                    heap.push(std::cmp::Reverse(cand));
                } else if let Some(mut worst) = heap.peek_mut() {
                    if cand > worst.0 {
                        *worst = std::cmp::Reverse(cand);
                    }
                }
            }
            let mut best: Vec<Candidate<T>> = heap.into_iter().map(|r| r.0).collect();
            best.sort_unstable_by(|a, b| b.cmp(a));
            entries = best
                .into_iter()
                .map(|c| Neighbor {
                    token: model.vocab()[c.index].clone(),
                    score: c.score,
                })
                .collect();
        }
        NeighborSet {
            query: model.vocab()[qi].clone(),
            k_requested: k,
            model_name: model.name().to_string(),
            entries,
        }
    }

    /// Runs `top_k` for every query in parallel. Unknown queries are reported
    /// in `skipped` rather than failing the batch.
    pub fn top_k_batch<S: AsRef<str> + Sync>(&self, queries: &[S], k: usize) -> BatchNeighbors<T> {
        let results: Vec<std::result::Result<NeighborSet<T>, String>> = queries
            .par_iter()
            .map(|q| {
                let q = q.as_ref();
                match self.model.index_of(q) {
                    Some(qi) => Ok(self.top_k_by_index(qi, k)),
                    None => Err(q.to_string()),
                }
            })
            .collect();
        let mut out = BatchNeighbors {
            sets: Vec::with_capacity(results.len()),
            skipped: Vec::new(),
        };
        for r in results {
            match r {
                Ok(set) => out.sets.push(set),
                Err(q) => out.skipped.push(q),
            }
        }
        out
    }
}

/// Convenience wrapper building a fresh [`NeighborIndex`] for a single query.
pub fn top_k<T: Scalar>(model: &EmbeddingModel<T>, query: &str, k: usize) -> Result<NeighborSet<T>> {
    NeighborIndex::new(model).top_k(query, k)
}

pub fn top_k_batch<T: Scalar, S: AsRef<str> + Sync>(
    model: &EmbeddingModel<T>,
    queries: &[S],
    k: usize,
) -> BatchNeighbors<T> {
    NeighborIndex::new(model).top_k_batch(queries, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted() -> EmbeddingModel<f64> {
        EmbeddingModel::from_rows(
            "planted",
            2,
            [
                ("a", vec![1.0, 0.0]),
                ("b", vec![0.9, 0.1]),
                ("c", vec![0.0, 1.0]),
                ("d", vec![-1.0, 0.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[2.0, 3.0], &[2.0, 3.0]).unwrap() - 1.0f64).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let want = 32.0 / (14f64.sqrt() * 77f64.sqrt());
        let got = cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((got - 0.974631).abs() < 1e-6);
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(cosine(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch(1, 2))));
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 2.0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn planted_neighbors() {
        let m = planted();
        let set = top_k(&m, "a", 2).unwrap();
        assert_eq!(set.tokens().collect::<Vec<_>>(), ["b", "c"]);
        assert!(set.entries[0].score > set.entries[1].score);
        assert!(top_k(&m, "a", 0).unwrap().entries.is_empty());
        assert_eq!(top_k(&m, "a", 10).unwrap().entries.len(), 3);
    }

    #[test]
    fn ties_prefer_lower_index() {
        let m = EmbeddingModel::<f64>::from_rows(
            "t",
            2,
            [
                ("q", vec![1.0, 0.0]),
                ("y", vec![0.0, 1.0]),
                ("x", vec![0.0, 1.0]),
                ("w", vec![0.0, -1.0]),
            ],
        )
        .unwrap();
        let set = top_k(&m, "q", 3).unwrap();
        assert_eq!(set.tokens().collect::<Vec<_>>(), ["y", "x", "w"]);
    }

    #[test]
    fn zero_rows_excluded() {
        let m = EmbeddingModel::<f32>::from_rows(
            "z",
            2,
            [("q", vec![1.0, 0.0]), ("z", vec![0.0, 0.0]), ("x", vec![0.5, 0.5])],
        )
        .unwrap();
        let set = top_k(&m, "q", 5).unwrap();
        assert_eq!(set.tokens().collect::<Vec<_>>(), ["x"]);
        assert!(top_k(&m, "z", 5).unwrap().entries.is_empty());
    }

    #[test]
    fn unknown_query() {
        assert!(matches!(top_k(&planted(), "nope", 1), Err(Error::UnknownToken(_))));
    }

    #[test]
    fn batch_skips_unknown() {
        let m = planted();
        let b = top_k_batch(&m, &["a"], 2);
        assert_eq!(b.sets, vec![top_k(&m, "a", 2).unwrap()]);
        assert!(b.skipped.is_empty());
        let b = top_k_batch(&m, &["a", "zzz"], 2);
        assert_eq!(b.sets.len(), 1);
        assert_eq!(b.skipped, ["zzz"]);
    }

    #[test]
    fn normalization_preserves_rankings() {
        let m = planted();
        let n = m.normalize_rows();
        for q in m.vocab() {
            let a = top_k(&m, q, 3).unwrap();
            let b = top_k(&n, q, 3).unwrap();
            assert_eq!(a.tokens().collect::<Vec<_>>(), b.tokens().collect::<Vec<_>>());
            for (x, y) in a.entries.iter().zip(&b.entries) {
                assert!((x.score - y.score).abs() < 1e-9);
            }
        }
    }
}
