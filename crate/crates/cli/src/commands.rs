use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use embeval_core::corpus::{corpus_stats, run_pipeline_dir, stats_csv, CorpusStats, PipelineConfig};
use embeval_core::embedding::model_name_from_path;
use embeval_core::io::write_atomic;
use embeval_core::knn::cache::{self, CacheHeader};
use embeval_core::metrics::{
    coverage_with_index, diversity_matrix, relation_queries, relational_coverage_from_table, single_token_queries,
    Denominator, MatchOptions, NeighborTable, OovPolicy,
};
use embeval_core::report::{self, CoverageTable, DiversityTable, RelationsTable};
use embeval_core::similarity::LengthIndex;
use embeval_core::thesaurus::DescriptorPair;
use embeval_core::{EmbeddingModel, Error, LoadOptions, NeighborIndex, NeighborSet, RelationType, Scalar, Thesaurus};
use log::{info, warn};

use crate::args::{
    CacheArgs, CleanArgs, Cli, Command, CoverageArgs, DiversityArgs, ModelArgs, NeighborsArgs, Precision,
    RelationsArgs, StatsArgs,
};
use crate::error::{CliError, CliResult};
use crate::manifest::{utf8_path, RunManifest};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Clean(a) => clean(&a),
        Command::Stats(a) => stats(&a),
        Command::Coverage(a) => match a.common.precision {
            Precision::F32 => coverage::<f32>(&a),
            Precision::F64 => coverage::<f64>(&a),
        },
        Command::Diversity(a) => match a.common.precision {
            Precision::F32 => diversity::<f32>(&a),
            Precision::F64 => diversity::<f64>(&a),
        },
        Command::Relations(a) => match a.common.precision {
            Precision::F32 => relations::<f32>(&a),
            Precision::F64 => relations::<f64>(&a),
        },
        Command::Neighbors(a) => match a.precision {
            Precision::F32 => neighbors::<f32>(&a),
            Precision::F64 => neighbors::<f64>(&a),
        },
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Sorted, deduplicated thresholds, each in (0, 1].
fn validate_thresholds(s: &[f64]) -> CliResult<Vec<f64>> {
    if let Some(bad) = s.iter().find(|v| !(v.is_finite() && **v > 0.0 && **v <= 1.0)) {
        return Err(usage(format!("--s {bad} is outside (0, 1]")));
    }
    let mut out = s.to_vec();
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Sorted, deduplicated neighborhood sizes, each at least 1.
fn validate_ks(k: &[usize]) -> CliResult<Vec<usize>> {
    if k.contains(&0) {
        return Err(usage("--k must be at least 1"));
    }
    Ok(k.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
}

fn validate_lang(lang: &str) -> CliResult<String> {
    let l = lang.to_ascii_lowercase();
    if l.len() != 2 || !l.bytes().all(|b| b.is_ascii_lowercase()) {
        return Err(usage(format!("--lang {lang:?} is not a two-letter language code")));
    }
    Ok(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ThesaurusFormat {
    NTriples,
    Tsv,
}

fn thesaurus_format(path: &Path) -> CliResult<ThesaurusFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("nt") => Ok(ThesaurusFormat::NTriples),
        Some("tsv") => Ok(ThesaurusFormat::Tsv),
        _ => Err(usage(format!("{}: thesaurus must end in .nt or .tsv", path.display()))),
    }
}

/// Checked model-related flags shared by the evaluation commands.
struct ModelPlan {
    models: Vec<(String, PathBuf)>,
    thesaurus: PathBuf,
    format: ThesaurusFormat,
    lang: String,
    opts: MatchOptions,
}

fn plan_models(a: &ModelArgs) -> CliResult<ModelPlan> {
    let mut seen = BTreeSet::new();
    let mut models = Vec::with_capacity(a.models.len());
    for p in &a.models {
        utf8_path(p)?;
        let name = model_name_from_path(p);
        if !seen.insert(name.clone()) {
            return Err(usage(format!("two models share the name {name:?}; rename one file")));
        }
        models.push((name, p.clone()));
    }
    utf8_path(&a.thesaurus)?;
    utf8_path(&a.out)?;
    Ok(ModelPlan {
        models,
        format: thesaurus_format(&a.thesaurus)?,
        thesaurus: a.thesaurus.clone(),
        lang: validate_lang(&a.lang)?,
        opts: MatchOptions {
            lowercase: !a.no_lowercase,
        },
    })
}

fn record_model_params(m: &mut RunManifest, a: &ModelArgs, plan: &ModelPlan) {
    m.param("lang", plan.lang.clone());
    m.param("lowercase", plan.opts.lowercase);
    m.param(
        "precision",
        match a.precision {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        },
    );
    m.param("models", plan.models.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>());
}

fn load_thesaurus(plan: &ModelPlan, manifest: &mut RunManifest) -> CliResult<Thesaurus> {
    manifest.add_input(&plan.thesaurus)?;
    let file = File::open(&plan.thesaurus).map_err(|e| Error::File {
        path: plan.thesaurus.clone(),
        source: e,
    })?;
    let reader = BufReader::new(file);
    let th = match plan.format {
        ThesaurusFormat::NTriples => Thesaurus::parse_ntriples(reader),
        ThesaurusFormat::Tsv => Thesaurus::parse_tsv(reader),
    }?;
    let rep = th.parse_report();
    info!(
        "{}: {} concepts, {} triples, {} skipped predicates, {} untagged labels",
        plan.thesaurus.display(),
        th.len(),
        rep.triples,
        rep.skipped_predicates,
        rep.untagged_labels
    );
    Ok(th)
}

fn load_model<T: Scalar>(
    name: &str,
    path: &Path,
    manifest: &mut RunManifest,
) -> CliResult<(EmbeddingModel<T>, String)> {
    let digest = manifest.add_input(path)?;
    let model = EmbeddingModel::load_vec_file(path, Some(name), LoadOptions::default())?;
    info!("{name}: {} words, dim {}", model.len(), model.dim());
    Ok((model, digest))
}

/// Writes named outputs into `dir` and records them in the manifest.
fn write_outputs(dir: &Path, files: &[(String, String)], manifest: &mut RunManifest) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| Error::File {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for (name, body) in files {
        write_atomic(&dir.join(name), body.as_bytes())?;
        manifest.outputs.push(name.clone());
    }
    Ok(())
}

fn coverage<T: Scalar>(a: &CoverageArgs) -> CliResult<()> {
    let plan = plan_models(&a.common)?;
    let thresholds = validate_thresholds(&a.s)?;
    let mut manifest = RunManifest::new("coverage");
    record_model_params(&mut manifest, &a.common, &plan);
    manifest.param("s", thresholds.clone());

    let th = load_thesaurus(&plan, &mut manifest)?;
    let keywords = th.keywords(&plan.lang);
    if keywords.is_empty() {
        warn!("no {} labels in {}", plan.lang, plan.thesaurus.display());
    }
    let mut per_model = Vec::with_capacity(plan.models.len());
    for (name, path) in &plan.models {
        let (model, _) = load_model::<T>(name, path, &mut manifest)?;
        let index = LengthIndex::new(model.vocab().iter().cloned());
        drop(model);
        let results: Vec<_> = thresholds
            .iter()
            .map(|&s| coverage_with_index(name, &index, &keywords, s, plan.opts))
            .collect();
        per_model.push(results);
    }
    manifest.summary("n_keywords", keywords.len());
    let table = CoverageTable::new(per_model);
    write_outputs(
        &a.common.out,
        &[
            ("coverage.csv".into(), table.to_csv()),
            ("coverage.md".into(), table.to_markdown()),
        ],
        &mut manifest,
    )?;
    manifest.finish(&a.common.out)
}

/// Neighborhoods of `queries` at depth `k`, read from and written to the
/// cache when one is configured. Out-of-vocabulary queries are left out.
fn neighbor_table<T: Scalar>(
    model: &EmbeddingModel<T>,
    digest: &str,
    queries: &[String],
    k: usize,
    cache_args: &CacheArgs,
) -> CliResult<NeighborTable> {
    let wanted: BTreeSet<&str> = queries
        .iter()
        .map(String::as_str)
        .filter(|q| model.contains(q))
        .collect();
    let index = NeighborIndex::new(model);
    let Some(dir) = &cache_args.cache_dir else {
        let batch = index.top_k_batch(&wanted.into_iter().collect::<Vec<_>>(), k);
        return Ok(NeighborTable::from_sets(model.name(), k, &batch.sets));
    };

    let path = cache::cache_path(dir, model.name(), k);
    let header = CacheHeader {
        model: model.name().to_string(),
        digest: digest.to_string(),
        k,
        dim: model.dim(),
    };
    let mut sets: BTreeMap<String, NeighborSet<T>> = if !cache_args.refresh && path.exists() {
        cache::load(&path, &header).map_err(|e| match e {
            Error::StaleCache { path, reason } => Error::StaleCache {
                path,
                reason: format!("{reason}; rerun with --refresh to rebuild it"),
            },
            other => other,
        })?
    } else {
        BTreeMap::new()
    };
    let missing: Vec<&str> = wanted.iter().copied().filter(|q| !sets.contains_key(*q)).collect();
    info!(
        "{}: {} cached neighborhoods, {} to compute",
        model.name(),
        wanted.len() - missing.len(),
        missing.len()
    );
    let fresh = index.top_k_batch(&missing, k);
    let changed = cache_args.refresh || !path.exists() || fresh.sets.iter().any(|s| !s.entries.is_empty());
    for set in fresh.sets {
        sets.insert(set.query.clone(), set);
    }
    if changed {
        let all: Vec<NeighborSet<T>> = sets.values().cloned().collect();
        cache::store(&path, &header, &all)?;
    }
    Ok(NeighborTable::from_sets(
        model.name(),
        k,
        sets.values().filter(|s| wanted.contains(s.query.as_str())),
    ))
}

fn record_cache_params(m: &mut RunManifest, c: &CacheArgs) -> CliResult<()> {
    m.param("cache", c.cache_dir.is_some());
    m.param("refresh", c.refresh);
    if let Some(d) = &c.cache_dir {
        utf8_path(d)?;
    }
    Ok(())
}

fn diversity<T: Scalar>(a: &DiversityArgs) -> CliResult<()> {
    let plan = plan_models(&a.common)?;
    if plan.models.len() < 2 {
        return Err(usage("diversity needs at least two --model files"));
    }
    let ks = validate_ks(&a.k)?;
    let denominator: Denominator = a.denominator.into();
    let mut manifest = RunManifest::new("diversity");
    record_model_params(&mut manifest, &a.common, &plan);
    record_cache_params(&mut manifest, &a.cache)?;
    manifest.param("k", ks.clone());
    manifest.param(
        "denominator",
        match denominator {
            Denominator::Evaluated => "evaluated",
            Denominator::Total => "total",
        },
    );

    let th = load_thesaurus(&plan, &mut manifest)?;
    let keywords = th.keywords(&plan.lang);
    let (queries, n_multi) = single_token_queries(&keywords, plan.opts);
    let k_max = *ks.last().expect("k list is non-empty");
    let mut tables = Vec::with_capacity(plan.models.len());
    for (name, path) in &plan.models {
        let (model, digest) = load_model::<T>(name, path, &mut manifest)?;
        tables.push(neighbor_table(&model, &digest, &queries, k_max, &a.cache)?);
    }
    let blocks: Vec<_> = ks
        .iter()
        .map(|&k| diversity_matrix(&tables, &keywords, k, denominator, plan.opts))
        .collect();
    manifest.summary("n_keywords", keywords.len());
    manifest.summary("n_multi_token", n_multi);
    let table = DiversityTable { blocks };
    write_outputs(
        &a.common.out,
        &[
            ("diversity.csv".into(), table.to_csv()),
            ("diversity_pairs.csv".into(), table.pairs_csv()),
            ("diversity.md".into(), table.to_markdown()),
        ],
        &mut manifest,
    )?;
    manifest.finish(&a.common.out)
}

fn relations<T: Scalar>(a: &RelationsArgs) -> CliResult<()> {
    let plan = plan_models(&a.common)?;
    let ks = validate_ks(&a.k)?;
    let policy: OovPolicy = a.oov_policy.into();
    let mut manifest = RunManifest::new("relations");
    record_model_params(&mut manifest, &a.common, &plan);
    record_cache_params(&mut manifest, &a.cache)?;
    manifest.param("k", ks.clone());
    manifest.param("single_word_only", a.single_word_only);
    manifest.param(
        "oov_policy",
        match policy {
            OovPolicy::Miss => "miss",
            OovPolicy::Skip => "skip",
        },
    );

    let th = load_thesaurus(&plan, &mut manifest)?;
    let mut pairs: Vec<DescriptorPair> = Vec::new();
    let (mut missing_label, mut multi_word) = (0, 0);
    for rel in RelationType::ALL {
        let sel = th.descriptor_pairs(rel, &plan.lang, a.single_word_only);
        manifest.summary(&format!("pairs_{}", rel.short()), sel.pairs.len());
        missing_label += sel.missing_label;
        multi_word += sel.multi_word;
        pairs.extend(sel.pairs);
    }
    manifest.summary("skipped_missing_label", missing_label);
    manifest.summary("skipped_multi_word", multi_word);
    let queries = relation_queries(&pairs, plan.opts);
    let k_max = *ks.last().expect("k list is non-empty");

    let mut tables = Vec::with_capacity(plan.models.len());
    for (name, path) in &plan.models {
        let (model, digest) = load_model::<T>(name, path, &mut manifest)?;
        tables.push(neighbor_table(&model, &digest, &queries, k_max, &a.cache)?);
    }
    let mut rows = Vec::with_capacity(ks.len() * tables.len());
    for &k in &ks {
        for t in &tables {
            rows.push((k, relational_coverage_from_table(t, &pairs, k, policy, plan.opts)));
        }
    }
    let table = RelationsTable {
        rows,
        n_pairs_total: pairs.len(),
    };
    write_outputs(
        &a.common.out,
        &[
            ("relations.csv".into(), table.to_csv()),
            ("relations_details.csv".into(), table.details_csv()),
            ("relations.md".into(), table.to_markdown()),
        ],
        &mut manifest,
    )?;
    manifest.finish(&a.common.out)
}

fn neighbors<T: Scalar>(a: &NeighborsArgs) -> CliResult<()> {
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    utf8_path(&a.model)?;
    let mut manifest = RunManifest::new("neighbors");
    manifest.param("word", a.word.clone());
    manifest.param("k", a.k);
    let name = model_name_from_path(&a.model);
    let (model, _) = load_model::<T>(&name, &a.model, &mut manifest)?;
    let set = NeighborIndex::new(&model).top_k(&a.word, a.k)?;
    let md = report::neighbors_markdown(&set);
    print!("{md}");
    if let Some(out) = &a.out {
        write_outputs(
            out,
            &[
                ("neighbors.csv".into(), report::neighbors_csv(&set)),
                ("neighbors.md".into(), md),
            ],
            &mut manifest,
        )?;
        manifest.finish(out)?;
    }
    Ok(())
}

fn clean(a: &CleanArgs) -> CliResult<()> {
    utf8_path(&a.input)?;
    utf8_path(&a.out)?;
    if a.corpus_name.is_empty() || a.corpus_name.contains(['/', '\\']) {
        return Err(usage(format!(
            "--corpus-name {:?} is not a plain file name",
            a.corpus_name
        )));
    }
    let mut manifest = RunManifest::new("clean");
    manifest.param("corpus_name", a.corpus_name.clone());
    let config = match &a.config {
        Some(p) => {
            manifest.add_input(p)?;
            let text = fs::read_to_string(p).map_err(|e| Error::File {
                path: p.clone(),
                source: e,
            })?;
            PipelineConfig::parse(&text)?
        }
        None => PipelineConfig::default(),
    };
    manifest.param("languages", config.languages.clone());
    manifest.param("confidence_threshold", config.confidence_threshold);
    manifest.param("cover_delimiter", config.cover_delimiter.clone());
    manifest.param("convert_numbers", config.convert_numbers);

    let mut docs: Vec<PathBuf> = fs::read_dir(&a.input)
        .map_err(|e| Error::File {
            path: a.input.clone(),
            source: e,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
        .collect();
    docs.sort();
    for d in &docs {
        manifest.add_input(d)?;
    }

    fs::create_dir_all(&a.out).map_err(|e| Error::File {
        path: a.out.clone(),
        source: e,
    })?;
    let (output, written) = run_pipeline_dir(&a.input, &a.out, &a.corpus_name, &config)?;
    let r = &output.report;
    manifest.summary("documents", r.documents);
    manifest.summary("empty_documents", r.empty_documents);
    manifest.summary("unreadable", r.unreadable.clone());
    manifest.summary("covers_missing", r.covers_missing);
    manifest.summary("unknown_lines", r.unknown_lines);
    manifest.summary("kept_lines", r.kept_lines);
    manifest.summary("duplicate_lines", r.duplicate_lines);
    for p in written {
        let name = p
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Internal(format!("unexpected output path {}", p.display())))?;
        manifest.outputs.push(name.to_string());
    }
    manifest.finish(&a.out)
}

/// Language of a `<name>.<lang>.txt` corpus file.
fn corpus_lang(path: &Path) -> Option<String> {
    let name = path.file_name()?.to_str()?;
    let stem = name.strip_suffix(".txt")?;
    let (_, lang) = stem.rsplit_once('.')?;
    (!lang.is_empty()).then(|| lang.to_string())
}

fn stats_markdown(stats: &[CorpusStats]) -> String {
    let mut out =
        String::from("| Language | Tokens | Vocabulary | Files | MB |\n| --- | ---: | ---: | ---: | ---: |\n");
    for s in stats {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {:.2} |\n",
            s.lang,
            report::grouped(s.tokens as usize),
            report::grouped(s.vocabulary as usize),
            report::grouped(s.files as usize),
            s.megabytes
        ));
    }
    out.push_str("\nCorpus statistics per language.\n");
    out
}

fn stats(a: &StatsArgs) -> CliResult<()> {
    let mut by_lang: BTreeMap<String, Vec<&PathBuf>> = BTreeMap::new();
    for p in &a.corpora {
        utf8_path(p)?;
        let lang = corpus_lang(p)
            .ok_or_else(|| usage(format!("{}: corpus files must be named <name>.<lang>.txt", p.display())))?;
        by_lang.entry(lang).or_default().push(p);
    }
    utf8_path(&a.out)?;
    let mut manifest = RunManifest::new("stats");
    let mut stats = Vec::with_capacity(by_lang.len());
    for (lang, paths) in &by_lang {
        let mut text = String::new();
        for p in paths {
            manifest.add_input(p)?;
            let body = fs::read_to_string(p).map_err(|e| Error::File {
                path: p.to_path_buf(),
                source: e,
            })?;
            text.push_str(&body);
            if !body.is_empty() && !body.ends_with('\n') {
                text.push('\n');
            }
        }
        let mut s = corpus_stats(lang, text.lines());
        s.files = paths.len() as u64;
        stats.push(s);
    }
    manifest.param("languages", by_lang.keys().cloned().collect::<Vec<_>>());
    write_outputs(
        &a.out,
        &[
            ("stats.csv".into(), stats_csv(&stats)),
            ("stats.md".into(), stats_markdown(&stats)),
        ],
        &mut manifest,
    )?;
    manifest.finish(&a.out)
}
