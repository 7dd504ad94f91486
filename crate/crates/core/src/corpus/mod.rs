//! Corpus cleaning: extracted document text in, per-language tokenized
//! sentence files out.

pub mod clean;
pub mod dedup;
pub mod langid;
pub mod numerals;
pub mod pipeline;

pub use clean::{
    dehyphenate, normalize_ws_lower, numbers_to_words, split_camel_case, split_sentences, strip_cover, tokenize,
};
pub use dedup::{dedup_sentences, fnv1a64, DedupReport};
pub use langid::{LangGuess, LanguageClassifier, TrigramClassifier};
pub use pipeline::{
    corpus_stats, run_pipeline, run_pipeline_dir, stats_csv, CorpusDocument, CorpusStats, Document, PipelineConfig,
    PipelineOutput, PipelineReport,
};
