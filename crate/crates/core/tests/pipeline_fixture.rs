use std::fs;
use std::path::PathBuf;

use embeval_core::corpus::langid::{LanguageClassifier, TrigramClassifier};
use embeval_core::corpus::{run_pipeline_dir, PipelineConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn config() -> PipelineConfig {
    PipelineConfig::parse(&fs::read_to_string(fixture("corpus/pipeline.conf")).unwrap()).unwrap()
}

#[test]
fn fixture_corpus_is_cleaned_and_deduplicated() {
    let out = tempfile::tempdir().unwrap();
    let (result, written) = run_pipeline_dir(&fixture("corpus/docs"), out.path(), "fixture", &config()).unwrap();
    assert_eq!(result.report.documents, 3);
    assert_eq!(result.report.covers_missing, 0);
    assert_eq!(result.report.duplicate_lines, 4);
    assert_eq!(
        result.corpora["de"],
        [
            "die sozialwissenschaft untersucht seit jahrzehnten die ursachen der sozialen ungleichheit in europa .",
            "die studie befragte zweiundvierzig haushalte in drei regionen .",
            "die ergebnisse zeigen deutliche unterschiede zwischen den bildungs schichten der bevölkerung .",
            "armut und benachteiligung hängen eng mit der struktur des arbeitsmarktes zusammen .",
        ]
    );
    assert_eq!(
        result.corpora["en"],
        [
            "the survey measured the income of one hundred twenty households in the northern districts .",
            "poverty and social exclusion are closely connected with the structure of the labour market .",
        ]
    );
    let names: Vec<String> = written
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, ["fixture.de.txt", "fixture.en.txt", "stats.csv"]);
    let stats = fs::read_to_string(out.path().join("stats.csv")).unwrap();
    assert!(stats.starts_with("lang,tokens,vocabulary,files,megabytes\n"));
}

#[test]
fn language_routing_accuracy() {
    let clf = TrigramClassifier::builtin(&["de", "en"], 0.6).unwrap();
    let text = fs::read_to_string(fixture("langid_200.tsv")).unwrap();
    let mut total = 0;
    let mut correct = 0;
    for line in text.lines().skip(1) {
        let (lang, sentence) = line.split_once('\t').unwrap();
        total += 1;
        if clf.classify(sentence).lang == lang {
            correct += 1;
        }
    }
    assert_eq!(total, 200);
    eprintln!("{correct}/200 lines routed correctly");
    assert!(correct >= 190, "{correct}/200 lines routed correctly");
}
