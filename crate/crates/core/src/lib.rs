//! Intrinsic evaluation of word-embedding models against a domain thesaurus.
//!
//! The crate covers the whole evaluation path:
//!
//! - [`embedding`]: loading and writing models in the word-vector text format,
//! - [`knn`]: exact top-k cosine neighborhoods and their on-disk cache,
//! - [`similarity`]: the substitution-cost-2 edit distance, its ratio similarity
//!   and a pruned best-match lookup over a vocabulary,
//! - [`thesaurus`]: SKOS thesauri read from N-Triples or TSV,
//! - [`metrics`]: vocabulary coverage, cross-model neighborhood diversity and
//!   relational coverage,
//! - [`corpus`]: the cleaning cascade that turns extracted document text into
//!   per-language training corpora,
//! - [`io`]: atomic file output,
//! - [`report`]: CSV and Markdown rendering of the result tables.
//!
//! Numeric code is generic over the vector component type through [`Scalar`];
//! [`Model`] and [`Model64`] are the concrete instantiations used in practice.

pub mod corpus;
pub mod digest;
pub mod embedding;
pub mod error;
pub mod io;
pub mod knn;
pub mod metrics;
pub mod report;
pub mod scalar;
pub mod similarity;
pub mod thesaurus;

pub use embedding::{EmbeddingModel, LoadOptions};
pub use error::{Error, Result};
pub use knn::{NeighborIndex, NeighborSet};
pub use scalar::Scalar;
pub use thesaurus::{RelationType, Thesaurus};

/// Single-precision model, the usual choice for pretrained vector files.
pub type Model = EmbeddingModel<f32>;
/// Double-precision model.
pub type Model64 = EmbeddingModel<f64>;
/// Neighborhood produced by a [`Model`].
pub type Neighbors = NeighborSet<f32>;
/// Neighborhood produced by a [`Model64`].
pub type Neighbors64 = NeighborSet<f64>;
