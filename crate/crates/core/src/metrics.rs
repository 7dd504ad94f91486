//! Coverage, diversity and relational coverage.
//!
//! All three metrics are integer counts turned into percentages:
//!
//! - coverage `c`: share of thesaurus keywords whose every token has a
//!   vocabulary match with ratio at least `s`;
//! - diversity `d`: share of keywords whose top-k neighborhoods in two models
//!   share no token;
//! - relational coverage `r`: share of descriptor/concept pairs where the
//!   concept label is among the descriptor's top-k neighbors.
//!
//! Neighborhoods are taken from a [`NeighborTable`], which can come from a
//! fresh search or from the on-disk cache; both give the same numbers.

use std::collections::{BTreeSet, HashMap, HashSet};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingModel;
use crate::knn::{NeighborIndex, NeighborSet};
use crate::scalar::Scalar;
use crate::similarity::LengthIndex;
use crate::thesaurus::{DescriptorPair, Keyword, RelationType};

/// Shared matching switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchOptions {
    /// Lowercase thesaurus labels and neighbor tokens before comparison.
    pub lowercase: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions { lowercase: true }
    }
}

fn case(s: &str, opts: MatchOptions) -> String {
    if opts.lowercase {
        s.to_lowercase()
    } else {
        s.to_string()
    }
}

/// Splits a keyword label into match tokens: hyphens become spaces, then the
/// label is split on whitespace.
pub fn keyword_tokens(label: &str, opts: MatchOptions) -> Vec<String> {
    case(label, opts)
        .replace('-', " ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn percent(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordHit {
    pub keyword: String,
    pub matched: Vec<String>,
    pub min_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub model: String,
    pub vocab_size: usize,
    pub s: f64,
    pub n_keywords: usize,
    pub n_covered: usize,
    /// Keywords that had no tokens left after normalization.
    pub n_empty: usize,
    pub c: f64,
    pub hits: Vec<KeywordHit>,
}

fn match_keyword(keyword: &Keyword, index: &LengthIndex, s: f64, opts: MatchOptions) -> Option<KeywordHit> {
    let tokens = keyword_tokens(&keyword.label, opts);
    let mut matched = Vec::with_capacity(tokens.len());
    let mut min_ratio = 1.0f64;
    for t in &tokens {
        let m = index.best_match(t, s)?;
        min_ratio = min_ratio.min(m.ratio);
        matched.push(m.matched_vocab_token);
    }
    (!tokens.is_empty()).then(|| KeywordHit {
        keyword: keyword.label.clone(),
        matched,
        min_ratio,
    })
}

/// Whether every token of `keyword` has a vocabulary match with ratio `>= s`.
///
/// Tokens are matched independently. A keyword that normalizes to no tokens
/// is not covered.
pub fn keyword_covered(keyword: &Keyword, index: &LengthIndex, s: f64, opts: MatchOptions) -> bool {
    if keyword_tokens(&keyword.label, opts).is_empty() {
        warn!("keyword {:?} has no tokens after normalization", keyword.label);
        return false;
    }
    match_keyword(keyword, index, s, opts).is_some()
}

/// Coverage against a prebuilt vocabulary index.
pub fn coverage_with_index(
    model_name: &str,
    index: &LengthIndex,
    keywords: &[Keyword],
    s: f64,
    opts: MatchOptions,
) -> CoverageResult {
    let hits: Vec<Option<KeywordHit>> = keywords.par_iter().map(|k| match_keyword(k, index, s, opts)).collect();
    let n_empty = keywords
        .iter()
        .filter(|k| keyword_tokens(&k.label, opts).is_empty())
        .count();
    if n_empty > 0 {
        warn!("{n_empty} keyword(s) have no tokens after normalization");
    }
    let hits: Vec<KeywordHit> = hits.into_iter().flatten().collect();
    CoverageResult {
        model: model_name.to_string(),
        vocab_size: index.len(),
        s,
        n_keywords: keywords.len(),
        n_covered: hits.len(),
        n_empty,
        c: percent(hits.len(), keywords.len()),
        hits,
    }
}

pub fn coverage<T: Scalar>(
    model: &EmbeddingModel<T>,
    keywords: &[Keyword],
    s: f64,
    opts: MatchOptions,
) -> CoverageResult {
    let index = LengthIndex::new(model.vocab().iter().cloned());
    coverage_with_index(model.name(), &index, keywords, s, opts)
}

/// Top-k neighbor tokens for a set of queries in one model.
///
/// Only in-vocabulary queries have an entry. Tokens are stored for the
/// largest k needed; smaller k use a prefix.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NeighborTable {
    pub model_name: String,
    pub k: usize,
    pub neighbors: HashMap<String, Vec<String>>,
}

impl NeighborTable {
    pub fn from_sets<'a, T: Scalar + 'a>(
        model_name: &str,
        k: usize,
        sets: impl IntoIterator<Item = &'a NeighborSet<T>>,
    ) -> Self {
        NeighborTable {
            model_name: model_name.to_string(),
            k,
            neighbors: sets
                .into_iter()
                .map(|s| (s.query.clone(), s.tokens().take(k).map(str::to_string).collect()))
                .collect(),
        }
    }

    /// Runs a batch search for the distinct `queries` at depth `k`.
    pub fn compute<T: Scalar>(index: &NeighborIndex<'_, T>, queries: &[String], k: usize) -> Self {
        let distinct: Vec<&str> = queries
            .iter()
            .map(String::as_str)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let batch = index.top_k_batch(&distinct, k);
        Self::from_sets(index.model().name(), k, &batch.sets)
    }

    pub fn contains(&self, query: &str) -> bool {
        self.neighbors.contains_key(query)
    }

    /// First `k` neighbors of `query`, if it was searched.
    pub fn top(&self, query: &str, k: usize) -> Option<&[String]> {
        assert!(k <= self.k, "table holds {} neighbors, {} requested", self.k, k);
        self.neighbors.get(query).map(|v| &v[..k.min(v.len())])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Denominator {
    /// Divide by keywords evaluable in both models.
    #[default]
    Evaluated,
    /// Divide by all keywords fed in.
    Total,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityResult {
    pub model_a: String,
    pub model_b: String,
    pub k: usize,
    pub n_total: usize,
    pub n_evaluated: usize,
    /// Keywords that are not a single token after normalization.
    pub n_multi_token: usize,
    /// Single-token keywords missing from either vocabulary.
    pub n_oov: usize,
    /// In-vocabulary keywords with an empty neighborhood in either model.
    pub n_empty: usize,
    pub n_disjoint: usize,
    pub denominator: Denominator,
    pub d: f64,
    pub d_evaluated: f64,
    pub d_total: f64,
}

impl DiversityResult {
    fn mirrored(&self) -> Self {
        DiversityResult {
            model_a: self.model_b.clone(),
            model_b: self.model_a.clone(),
            ..self.clone()
        }
    }
}

/// Splits keywords into single-token diversity queries; returns the queries
/// and the number of multi-token keywords.
pub fn single_token_queries(keywords: &[Keyword], opts: MatchOptions) -> (Vec<String>, usize) {
    let mut queries = Vec::with_capacity(keywords.len());
    let mut multi = 0;
    for k in keywords {
        let mut tokens = keyword_tokens(&k.label, opts);
        if tokens.len() == 1 {
            queries.push(tokens.pop().unwrap());
        } else {
            multi += 1;
        }
    }
    (queries, multi)
}

/// Diversity from precomputed neighborhoods.
pub fn diversity_from_tables(
    a: &NeighborTable,
    b: &NeighborTable,
    keywords: &[Keyword],
    k: usize,
    denominator: Denominator,
    opts: MatchOptions,
) -> DiversityResult {
    assert!(k >= 1, "diversity needs k >= 1");
    let (queries, n_multi_token) = single_token_queries(keywords, opts);
    let (mut n_oov, mut n_empty, mut n_evaluated, mut n_disjoint) = (0, 0, 0, 0);
    for q in &queries {
        let (Some(na), Some(nb)) = (a.top(q, k), b.top(q, k)) else {
            n_oov += 1;
            continue;
        };
        if na.is_empty() || nb.is_empty() {
            n_empty += 1;
            continue;
        }
        n_evaluated += 1;
        let set_a: HashSet<String> = na.iter().map(|t| case(t, opts)).collect();
        if !nb.iter().any(|t| set_a.contains(&case(t, opts))) {
            n_disjoint += 1;
        }
    }
    let d_evaluated = percent(n_disjoint, n_evaluated);
    let d_total = percent(n_disjoint, keywords.len());
    DiversityResult {
        model_a: a.model_name.clone(),
        model_b: b.model_name.clone(),
        k,
        n_total: keywords.len(),
        n_evaluated,
        n_multi_token,
        n_oov,
        n_empty,
        n_disjoint,
        denominator,
        d: match denominator {
            Denominator::Evaluated => d_evaluated,
            Denominator::Total => d_total,
        },
        d_evaluated,
        d_total,
    }
}

pub fn diversity<T: Scalar>(
    model_a: &EmbeddingModel<T>,
    model_b: &EmbeddingModel<T>,
    keywords: &[Keyword],
    k: usize,
    denominator: Denominator,
    opts: MatchOptions,
) -> DiversityResult {
    let (queries, _) = single_token_queries(keywords, opts);
    let ta = NeighborTable::compute(&NeighborIndex::new(model_a), &queries, k);
    let tb = NeighborTable::compute(&NeighborIndex::new(model_b), &queries, k);
    diversity_from_tables(&ta, &tb, keywords, k, denominator, opts)
}

/// Symmetric matrix of pairwise diversities for one k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityMatrix {
    pub models: Vec<String>,
    pub k: usize,
    pub cells: Vec<Vec<DiversityResult>>,
}

impl DiversityMatrix {
    pub fn get(&self, i: usize, j: usize) -> &DiversityResult {
        &self.cells[i][j]
    }
}

/// Every unordered pair is computed once and mirrored; the diagonal is zero.
pub fn diversity_matrix(
    tables: &[NeighborTable],
    keywords: &[Keyword],
    k: usize,
    denominator: Denominator,
    opts: MatchOptions,
) -> DiversityMatrix {
    assert!(tables.len() >= 2, "diversity matrix needs at least two models");
    let n = tables.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let computed: Vec<DiversityResult> = pairs
        .par_iter()
        .map(|&(i, j)| diversity_from_tables(&tables[i], &tables[j], keywords, k, denominator, opts))
        .collect();
    let mut cells: Vec<Vec<Option<DiversityResult>>> = vec![vec![None; n]; n];
    for (&(i, j), r) in pairs.iter().zip(computed) {
        cells[j][i] = Some(r.mirrored());
        cells[i][j] = Some(r);
    }
    for (i, t) in tables.iter().enumerate() {
        let (queries, n_multi_token) = single_token_queries(keywords, opts);
        let in_vocab: Vec<&String> = queries.iter().filter(|q| t.contains(q)).collect();
        let n_empty = in_vocab
            .iter()
            .filter(|q| t.top(q, k).is_some_and(<[String]>::is_empty))
            .count();
        cells[i][i] = Some(DiversityResult {
            model_a: t.model_name.clone(),
            model_b: t.model_name.clone(),
            k,
            n_total: keywords.len(),
            n_evaluated: in_vocab.len() - n_empty,
            n_multi_token,
            n_oov: queries.len() - in_vocab.len(),
            n_empty,
            n_disjoint: 0,
            denominator,
            d: 0.0,
            d_evaluated: 0.0,
            d_total: 0.0,
        });
    }
    DiversityMatrix {
        models: tables.iter().map(|t| t.model_name.clone()).collect(),
        k,
        cells: cells
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.expect("all cells filled")).collect())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OovPolicy {
    /// Out-of-vocabulary descriptors count as misses and stay in `n`.
    #[default]
    Miss,
    /// Out-of-vocabulary descriptors are dropped from `n`.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationalResult {
    pub model: String,
    pub relation: RelationType,
    pub k: usize,
    pub n_pairs: usize,
    pub n_found: usize,
    /// Pairs whose descriptor had no neighborhood in the model.
    pub n_oov: usize,
    pub policy: OovPolicy,
    pub r: f64,
}

/// Descriptor query form of a pair label: cased per `opts`, `None` when it
/// is not a single token.
pub fn descriptor_query(label: &str, opts: MatchOptions) -> Option<String> {
    let q = case(label.trim(), opts);
    (!q.is_empty() && !q.contains(char::is_whitespace)).then_some(q)
}

/// Relational coverage per relation type, always reported in
/// bro/nar/rel/alt order.
pub fn relational_coverage_from_table(
    table: &NeighborTable,
    pairs: &[DescriptorPair],
    k: usize,
    policy: OovPolicy,
    opts: MatchOptions,
) -> Vec<RelationalResult> {
    assert!(k >= 1, "relational coverage needs k >= 1");
    RelationType::ALL
        .iter()
        .map(|&rel| {
            let (mut n, mut found, mut oov) = (0, 0, 0);
            for p in pairs.iter().filter(|p| p.relation == rel) {
                let neighbors = descriptor_query(&p.descriptor_label, opts).and_then(|q| table.top(&q, k));
                let Some(neighbors) = neighbors else {
                    oov += 1;
                    if policy == OovPolicy::Miss {
                        n += 1;
                    }
                    continue;
                };
                n += 1;
                let target = case(p.concept_label.trim(), opts);
                if neighbors.iter().any(|t| case(t, opts) == target) {
                    found += 1;
                }
            }
            if n == 0 {
                warn!("model {:?}: no {rel} pairs to evaluate at k={k}", table.model_name);
            }
            RelationalResult {
                model: table.model_name.clone(),
                relation: rel,
                k,
                n_pairs: n,
                n_found: found,
                n_oov: oov,
                policy,
                r: percent(found, n),
            }
        })
        .collect()
}

/// Distinct descriptor queries needed for `pairs`.
pub fn relation_queries(pairs: &[DescriptorPair], opts: MatchOptions) -> Vec<String> {
    pairs
        .iter()
        .filter_map(|p| descriptor_query(&p.descriptor_label, opts))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub fn relational_coverage<T: Scalar>(
    model: &EmbeddingModel<T>,
    pairs: &[DescriptorPair],
    k: usize,
    policy: OovPolicy,
    opts: MatchOptions,
) -> Vec<RelationalResult> {
    let table = NeighborTable::compute(&NeighborIndex::new(model), &relation_queries(pairs, opts), k);
    relational_coverage_from_table(&table, pairs, k, policy, opts)
}
