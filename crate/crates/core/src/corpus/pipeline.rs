//! The full cleaning cascade and corpus statistics.
//!
//! Per document, in order: cover stripping, dehyphenation, camel-case
//! splitting, sentence splitting, language routing, numeral conversion,
//! whitespace and case normalization, tokenization. Deduplication then runs
//! serially over all documents in input order. Documents are cleaned in
//! parallel; the output does not depend on the number of workers.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::clean::{
    cover_regex, dehyphenate, normalize_ws_lower, numbers_to_words, split_camel_case, split_intraword_hyphens,
    split_sentences, strip_cover, tokenize,
};
use super::dedup::{DedupReport, Deduplicator};
use super::langid::{LanguageClassifier, TrigramClassifier};
use crate::error::{Error, Result};
use crate::io::write_atomic;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub languages: Vec<String>,
    pub confidence_threshold: f64,
    /// Regex (multi-line mode) for the line closing the cover page.
    pub cover_delimiter: Option<String>,
    pub convert_numbers: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            languages: vec!["de".into(), "en".into()],
            confidence_threshold: 0.6,
            cover_delimiter: None,
            convert_numbers: true,
        }
    }
}

impl PipelineConfig {
    /// Parses `key=value` lines; `#` starts a comment line. Unset keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "languages" => {
                    cfg.languages = value
                        .split(',')
                        .map(|l| l.trim().to_ascii_lowercase())
                        .filter(|l| !l.is_empty())
                        .collect();
                }
                "confidence_threshold" => {
                    cfg.confidence_threshold = value
                        .parse()
                        .map_err(|_| Error::Config(format!("line {}: invalid threshold {value:?}", i + 1)))?;
                }
                "cover_delimiter" => cfg.cover_delimiter = (!value.is_empty()).then(|| value.to_string()),
                "convert_numbers" => {
                    cfg.convert_numbers = match value {
                        "true" | "yes" | "1" => true,
                        "false" | "no" | "0" => false,
                        _ => return Err(Error::Config(format!("line {}: invalid boolean {value:?}", i + 1))),
                    };
                }
                other => return Err(Error::Config(format!("line {}: unknown key {other:?}", i + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.languages.is_empty() {
            return Err(Error::Config("no languages configured".into()));
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(Error::Config(format!(
                "confidence threshold {} outside [0, 1]",
                self.confidence_threshold
            )));
        }
        if let Some(p) = &self.cover_delimiter {
            cover_regex(p).map_err(|e| Error::Config(format!("cover delimiter: {e}")))?;
        }
        Ok(())
    }

    pub fn classifier(&self) -> Result<TrigramClassifier> {
        TrigramClassifier::builtin(&self.languages, self.confidence_threshold)
    }
}

/// One input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
}

/// A document after cleaning, before deduplication.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusDocument {
    pub doc_id: String,
    /// `(language, tokenized line)` for every routed sentence.
    pub lines: Vec<(String, String)>,
    pub unknown_lines: usize,
    pub cover_found: bool,
}

/// Token, vocabulary and size statistics for one language.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub lang: String,
    pub tokens: u64,
    pub vocabulary: u64,
    pub files: u64,
    pub megabytes: f64,
}

impl CorpusStats {
    pub const CSV_HEADER: &'static str = "lang,tokens,vocabulary,files,megabytes";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.2}",
            self.lang, self.tokens, self.vocabulary, self.files, self.megabytes
        )
    }
}

pub fn stats_csv(stats: &[CorpusStats]) -> String {
    let mut out = String::from(CorpusStats::CSV_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PipelineReport {
    pub documents: usize,
    pub empty_documents: usize,
    pub unreadable: Vec<String>,
    pub covers_missing: usize,
    pub unknown_lines: usize,
    pub kept_lines: usize,
    pub duplicate_lines: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// Tokenized lines per language, in document order.
    pub corpora: BTreeMap<String, Vec<String>>,
    pub stats: Vec<CorpusStats>,
    pub report: PipelineReport,
}

const BYTES_PER_MB: f64 = 1024.0 * 1024.0;

/// Cleans one document up to (not including) deduplication.
pub fn clean_document(
    doc: &Document,
    config: &PipelineConfig,
    cover: Option<&regex::Regex>,
    classifier: &dyn LanguageClassifier,
) -> CorpusDocument {
    let (text, cover_found) = match cover {
        Some(re) => strip_cover(&doc.text, re),
        None => (doc.text.clone(), true),
    };
    let text = split_camel_case(&dehyphenate(&text));
    let mut lines = Vec::new();
    let mut unknown_lines = 0;
    for sentence in split_sentences(&text) {
        let guess = classifier.classify(sentence);
        if guess.is_unknown() {
            unknown_lines += 1;
            continue;
        }
        let mut line = sentence.to_string();
        if config.convert_numbers {
            line = split_intraword_hyphens(&numbers_to_words(&line, &guess.lang));
        }
        let tokens = tokenize(&normalize_ws_lower(&line));
        if !tokens.is_empty() {
            lines.push((guess.lang, tokens.join(" ")));
        }
    }
    CorpusDocument {
        doc_id: doc.id.clone(),
        lines,
        unknown_lines,
        cover_found,
    }
}

/// Runs the whole cascade over in-memory documents.
pub fn run_pipeline(
    documents: &[Document],
    config: &PipelineConfig,
    classifier: &dyn LanguageClassifier,
) -> Result<PipelineOutput> {
    config.validate()?;
    let cover = config
        .cover_delimiter
        .as_deref()
        .map(cover_regex)
        .transpose()
        .map_err(|e| Error::Config(e.to_string()))?;
    let cleaned: Vec<CorpusDocument> = documents
        .par_iter()
        .map(|d| clean_document(d, config, cover.as_ref(), classifier))
        .collect();

    let mut report = PipelineReport {
        documents: documents.len(),
        ..PipelineReport::default()
    };
    let mut dedup = Deduplicator::new();
    let mut corpora: BTreeMap<String, Vec<String>> = config.languages.iter().map(|l| (l.clone(), Vec::new())).collect();
    let mut files: BTreeMap<String, u64> = BTreeMap::new();
    for (doc, cd) in documents.iter().zip(&cleaned) {
        if doc.text.trim().is_empty() {
            report.empty_documents += 1;
        }
        if !cd.cover_found {
            report.covers_missing += 1;
        }
        report.unknown_lines += cd.unknown_lines;
        let mut contributed: BTreeSet<&str> = BTreeSet::new();
        for (lang, line) in &cd.lines {
            if dedup.insert(line) {
                corpora.entry(lang.clone()).or_default().push(line.clone());
                contributed.insert(lang);
            }
        }
        for lang in contributed {
            *files.entry(lang.to_string()).or_insert(0) += 1;
        }
    }
    let DedupReport { kept, dropped } = dedup.report();
    report.kept_lines = kept;
    report.duplicate_lines = dropped;
    if kept == 0 {
        warn!("pipeline produced no output lines");
    }

    let stats = corpora
        .iter()
        .map(|(lang, lines)| {
            let mut s = corpus_stats(lang, lines.iter().map(String::as_str));
            s.files = files.get(lang).copied().unwrap_or(0);
            s
        })
        .collect();
    Ok(PipelineOutput { corpora, stats, report })
}

/// Token count, distinct tokens and size of a corpus given as lines.
/// `files` is left at 0 for the caller to fill in.
pub fn corpus_stats<'a>(lang: &str, lines: impl IntoIterator<Item = &'a str>) -> CorpusStats {
    let mut tokens = 0u64;
    let mut bytes = 0u64;
    let mut vocab: BTreeSet<&str> = BTreeSet::new();
    for line in lines {
        bytes += line.len() as u64 + 1;
        for t in line.split_whitespace() {
            tokens += 1;
            vocab.insert(t);
        }
    }
    CorpusStats {
        lang: lang.to_string(),
        tokens,
        vocabulary: vocab.len() as u64,
        files: 0,
        megabytes: bytes as f64 / BYTES_PER_MB,
    }
}

/// Output path of one language corpus: `<dir>/<corpus>.<lang>.txt`.
pub fn corpus_path(dir: &Path, corpus_name: &str, lang: &str) -> PathBuf {
    dir.join(format!("{corpus_name}.{lang}.txt"))
}

/// Reads every `*.txt` file of `input_dir` (sorted by name), runs the
/// pipeline, and writes one corpus file per language plus `stats.csv`.
///
/// Files that are not valid UTF-8 or cannot be read are skipped and listed in
/// the report.
pub fn run_pipeline_dir(
    input_dir: &Path,
    output_dir: &Path,
    corpus_name: &str,
    config: &PipelineConfig,
) -> Result<(PipelineOutput, Vec<PathBuf>)> {
    let classifier = config.classifier()?;
    let mut paths: Vec<PathBuf> = fs::read_dir(input_dir)
        .map_err(|e| Error::file(input_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();

    let mut documents = Vec::with_capacity(paths.len());
    let mut unreadable = Vec::new();
    for p in &paths {
        let id = p
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match fs::read(p).map(String::from_utf8) {
            Ok(Ok(text)) => documents.push(Document { id, text }),
            Ok(Err(_)) => {
                warn!("{}: not valid UTF-8, skipped", p.display());
                unreadable.push(id);
            }
            Err(e) => {
                warn!("{}: {e}, skipped", p.display());
                unreadable.push(id);
            }
        }
    }

    let mut output = run_pipeline(&documents, config, &classifier)?;
    output.report.unreadable = unreadable;
    output.report.documents += output.report.unreadable.len();

    fs::create_dir_all(output_dir).map_err(|e| Error::file(output_dir, e))?;
    let mut written = Vec::new();
    for (lang, lines) in &output.corpora {
        let path = corpus_path(output_dir, corpus_name, lang);
        let mut body = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
        for l in lines {
            body.push_str(l);
            body.push('\n');
        }
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    let stats_path = output_dir.join("stats.csv");
    write_atomic(&stats_path, stats_csv(&output.stats).as_bytes())?;
    written.push(stats_path);
    Ok((output, written))
}
