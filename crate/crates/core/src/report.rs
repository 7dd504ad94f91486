//! CSV and Markdown tables for the three metrics.
//!
//! CSV is the machine-readable form. Markdown follows the usual result-table
//! layouts: coverage has thresholds as rows and models as columns, diversity
//! is one symmetric block per k, relational coverage has one row per model
//! per k with bro/nar/rel/alt columns. Percentages use two decimals.

use std::fmt::Write as _;

use crate::knn::NeighborSet;
use crate::metrics::{CoverageResult, DiversityMatrix, RelationalResult};
use crate::scalar::Scalar;
use crate::thesaurus::RelationType;

pub fn pct(v: f64) -> String {
    format!("{v:.2}")
}

/// Shortest round-trip form of a threshold: 0.9, 0.95, 1.0.
pub fn threshold_label(s: f64) -> String {
    format!("{s:?}")
}

/// Integer with comma thousands separators.
pub fn grouped(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn md_row<I: IntoIterator<Item = String>>(cells: I) -> String {
    let mut line = String::from("|");
    for c in cells {
        line.push(' ');
        line.push_str(&c);
        line.push_str(" |");
    }
    line.push('\n');
    line
}

fn md_rule(left: usize, right: usize) -> String {
    let mut cells = vec!["---".to_string(); left];
    cells.extend(std::iter::repeat_n("---:".to_string(), right));
    md_row(cells)
}

/// Coverage results, `cells[row][col]` for threshold row and model column.
#[derive(Debug, Clone)]
pub struct CoverageTable {
    pub models: Vec<String>,
    pub vocab_sizes: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub cells: Vec<Vec<CoverageResult>>,
}

impl CoverageTable {
    /// Groups per-model result lists (one entry per threshold, same order).
    pub fn new(per_model: Vec<Vec<CoverageResult>>) -> Self {
        let models = per_model.iter().map(|r| r[0].model.clone()).collect();
        let vocab_sizes = per_model.iter().map(|r| r[0].vocab_size).collect();
        let thresholds: Vec<f64> = per_model[0].iter().map(|r| r.s).collect();
        let cells = (0..thresholds.len())
            .map(|i| per_model.iter().map(|r| r[i].clone()).collect())
            .collect();
        CoverageTable {
            models,
            vocab_sizes,
            thresholds,
            cells,
        }
    }

    pub fn n_keywords(&self) -> usize {
        self.cells.first().and_then(|r| r.first()).map_or(0, |c| c.n_keywords)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for m in &self.models {
            let _ = write!(out, ",{m}");
        }
        out.push_str("\nvocab_size");
        for v in &self.vocab_sizes {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
        for (s, row) in self.thresholds.iter().zip(&self.cells) {
            let _ = write!(out, "s={}", threshold_label(*s));
            for c in row {
                let _ = write!(out, ",{}", pct(c.c));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = md_row(std::iter::once(String::new()).chain(self.models.iter().cloned()));
        out.push_str(&md_rule(1, self.models.len()));
        out.push_str(&md_row(
            std::iter::once("Vocab size".to_string()).chain(self.vocab_sizes.iter().map(|&v| grouped(v))),
        ));
        for (s, row) in self.thresholds.iter().zip(&self.cells) {
            out.push_str(&md_row(
                std::iter::once(format!("s={}", threshold_label(*s))).chain(row.iter().map(|c| pct(c.c))),
            ));
        }
        let _ = writeln!(
            out,
            "\nCoverage of thesaurus keywords in the vocabulary of each model (n={} keywords).",
            grouped(self.n_keywords())
        );
        out
    }
}

/// One diversity matrix per k.
#[derive(Debug, Clone)]
pub struct DiversityTable {
    pub blocks: Vec<DiversityMatrix>,
}

impl DiversityTable {
    pub fn to_csv(&self) -> String {
        let Some(first) = self.blocks.first() else {
            return String::new();
        };
        let mut out = String::from("k,model");
        for m in &first.models {
            let _ = write!(out, ",{m}");
        }
        out.push('\n');
        for b in &self.blocks {
            for (i, m) in b.models.iter().enumerate() {
                let _ = write!(out, "{},{m}", b.k);
                for j in 0..b.models.len() {
                    let _ = write!(out, ",{}", pct(b.get(i, j).d));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Per-pair counts, each unordered pair once.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from(
            "k,model_a,model_b,n_total,n_evaluated,n_multi_token,n_oov,n_empty,n_disjoint,d_evaluated,d_total\n",
        );
        for b in &self.blocks {
            for i in 0..b.models.len() {
                for j in i + 1..b.models.len() {
                    let r = b.get(i, j);
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        r.k,
                        r.model_a,
                        r.model_b,
                        r.n_total,
                        r.n_evaluated,
                        r.n_multi_token,
                        r.n_oov,
                        r.n_empty,
                        r.n_disjoint,
                        pct(r.d_evaluated),
                        pct(r.d_total)
                    );
                }
            }
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let Some(first) = self.blocks.first() else {
            return String::new();
        };
        let mut out = md_row(
            ["top-k".to_string(), "Model".to_string()]
                .into_iter()
                .chain(first.models.iter().cloned()),
        );
        out.push_str(&md_rule(2, first.models.len()));
        for b in &self.blocks {
            for (i, m) in b.models.iter().enumerate() {
                let k = if i == 0 { b.k.to_string() } else { String::new() };
                let cells = (0..b.models.len()).map(|j| if i == j { "-".to_string() } else { pct(b.get(i, j).d) });
                out.push_str(&md_row([k, m.clone()].into_iter().chain(cells)));
            }
        }
        let n_total = first.cells.first().and_then(|r| r.first()).map_or(0, |c| c.n_total);
        let policy = match first.cells[0][0].denominator {
            crate::metrics::Denominator::Evaluated => "keywords evaluable in both models",
            crate::metrics::Denominator::Total => "all keywords",
        };
        let _ = writeln!(
            out,
            "\nDiversity between models (n={} keywords; percentages over {policy}).",
            grouped(n_total)
        );
        out
    }
}

/// Relational coverage, one entry per (k, model) holding the four relation
/// results in bro/nar/rel/alt order.
#[derive(Debug, Clone)]
pub struct RelationsTable {
    pub rows: Vec<(usize, Vec<RelationalResult>)>,
    /// Pair counts per relation after filtering, for the caption.
    pub n_pairs_total: usize,
}

impl RelationsTable {
    fn ordered(results: &[RelationalResult]) -> Vec<&RelationalResult> {
        RelationType::ALL
            .iter()
            .filter_map(|rel| results.iter().find(|r| r.relation == *rel))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,model");
        for rel in RelationType::ALL {
            let _ = write!(out, ",{}", rel.short());
        }
        out.push('\n');
        for (k, results) in &self.rows {
            let _ = write!(out, "{k},{}", results.first().map_or("", |r| r.model.as_str()));
            for r in Self::ordered(results) {
                let _ = write!(out, ",{}", pct(r.r));
            }
            out.push('\n');
        }
        out
    }

    pub fn details_csv(&self) -> String {
        let mut out = String::from("k,model,relation,n_pairs,n_found,n_oov,r\n");
        for (k, results) in &self.rows {
            for r in Self::ordered(results) {
                let _ = writeln!(
                    out,
                    "{k},{},{},{},{},{},{}",
                    r.model,
                    r.relation.short(),
                    r.n_pairs,
                    r.n_found,
                    r.n_oov,
                    pct(r.r)
                );
            }
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = md_row(
            ["top-k".to_string(), "Model".to_string()]
                .into_iter()
                .chain(RelationType::ALL.iter().map(|r| r.short().to_string())),
        );
        out.push_str(&md_rule(2, RelationType::ALL.len()));
        let mut last_k = None;
        let mut any_empty = false;
        for (k, results) in &self.rows {
            let k_cell = if last_k == Some(*k) {
                String::new()
            } else {
                k.to_string()
            };
            last_k = Some(*k);
            let model = results.first().map_or(String::new(), |r| r.model.clone());
            let cells = Self::ordered(results).into_iter().map(|r| {
                if r.n_pairs == 0 {
                    any_empty = true;
                    format!("{}*", pct(r.r))
                } else {
                    pct(r.r)
                }
            });
            let cells: Vec<String> = cells.collect();
            out.push_str(&md_row([k_cell, model].into_iter().chain(cells)));
        }
        let _ = writeln!(
            out,
            "\nRelational coverage of all models (n={} descriptor-concept pairs).",
            grouped(self.n_pairs_total)
        );
        if any_empty {
            out.push_str("\n\\* no pairs were evaluated for this relation (n=0).\n");
        }
        out
    }
}

/// Neighbors of one word as a rank/token/score table.
pub fn neighbors_csv<T: Scalar>(set: &NeighborSet<T>) -> String {
    let mut out = String::from("rank,token,score\n");
    for (i, n) in set.entries.iter().enumerate() {
        let _ = writeln!(out, "{},{},{:.6}", i + 1, n.token, n.score);
    }
    out
}

pub fn neighbors_markdown<T: Scalar>(set: &NeighborSet<T>) -> String {
    let mut out = md_row(["rank".to_string(), "token".to_string(), "score".to_string()]);
    out.push_str(&md_rule(1, 2));
    for (i, n) in set.entries.iter().enumerate() {
        out.push_str(&md_row([
            (i + 1).to_string(),
            n.token.clone(),
            format!("{:.6}", n.score),
        ]));
    }
    let _ = writeln!(
        out,
        "\nTop-{} neighbors of {:?} in {}.",
        set.k_requested, set.query, set.model_name
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::OovPolicy;

    #[test]
    fn number_formats() {
        assert_eq!(pct(100.0 / 3.0), "33.33");
        assert_eq!(pct(200.0 / 3.0), "66.67");
        assert_eq!(threshold_label(0.9), "0.9");
        assert_eq!(threshold_label(1.0), "1.0");
        assert_eq!(threshold_label(0.95), "0.95");
        assert_eq!(grouped(403452), "403,452");
        assert_eq!(grouped(2275233), "2,275,233");
        assert_eq!(grouped(999), "999");
    }

    fn cov(model: &str, s: f64, c: f64) -> CoverageResult {
        CoverageResult {
            model: model.into(),
            vocab_size: 1000,
            s,
            n_keywords: 3,
            n_covered: 0,
            n_empty: 0,
            c,
            hits: vec![],
        }
    }

    #[test]
    fn coverage_layout() {
        let t = CoverageTable::new(vec![
            vec![cov("a", 0.9, 50.0), cov("a", 1.0, 25.0)],
            vec![cov("b", 0.9, 60.0), cov("b", 1.0, 30.0)],
        ]);
        assert_eq!(
            t.to_csv(),
            "row,a,b\nvocab_size,1000,1000\ns=0.9,50.00,60.00\ns=1.0,25.00,30.00\n"
        );
        let md = t.to_markdown();
        assert!(md.starts_with("|  | a | b |\n| --- | ---: | ---: |\n| Vocab size | 1,000 | 1,000 |\n"));
    }

    #[test]
    fn relations_columns_and_empty_flag() {
        let mk = |rel, n, r| RelationalResult {
            model: "m".into(),
            relation: rel,
            k: 10,
            n_pairs: n,
            n_found: 0,
            n_oov: 0,
            policy: OovPolicy::Miss,
            r,
        };
        let t = RelationsTable {
            rows: vec![(
                10,
                vec![
                    mk(RelationType::AltLabel, 4, 25.0),
                    mk(RelationType::Broader, 0, 0.0),
                    mk(RelationType::Related, 2, 50.0),
                    mk(RelationType::Narrower, 1, 100.0),
                ],
            )],
            n_pairs_total: 7,
        };
        assert_eq!(t.to_csv(), "k,model,bro,nar,rel,alt\n10,m,0.00,100.00,50.00,25.00\n");
        let md = t.to_markdown();
        assert!(md.contains("| 10 | m | 0.00* | 100.00 | 50.00 | 25.00 |"));
        assert!(md.contains("n=0"));
    }
}
