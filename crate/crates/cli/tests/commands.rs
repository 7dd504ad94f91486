use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn embeval(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embeval"))
        .args(args)
        .current_dir(cwd)
        .env_remove("EMBEVAL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

const MODEL_A: &str = "6 3
armut 1 0 0
verarmung 0.9 0.1 0
benachteiligung 0.8 0.3 0
sozial 0 1 0
ungleichheit 0 0.9 0.2
sozialstruktur 0 0 1
";

const MODEL_B: &str = "5 3
armut 1 0 0
benachteiligung 0.2 1 0
verarmung 0 0 1
soziale 0 0.5 0.5
ungleichheit 0.5 0.5 0
";

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.vec"), MODEL_A).unwrap();
    fs::write(dir.path().join("b.vec"), MODEL_B).unwrap();
    dir
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn coverage_single_model_single_threshold() {
    let dir = workdir();
    let th = fixture("inequality.nt");
    ok(&embeval(
        &[
            "coverage",
            "--model",
            "a.vec",
            "--thesaurus",
            th.to_str().unwrap(),
            "--s",
            "1.0",
            "--out",
            "out",
        ],
        dir.path(),
    ));
    // Exact keywords in a: Armut, Sozialstruktur, Ungleichheit, Verarmung,
    // Benachteiligung. Missing: Bildungsungleichheit, soziale Ungleichheit.
    assert_eq!(
        read(&dir.path().join("out"), "coverage.csv"),
        "row,a\nvocab_size,6\ns=1.0,71.43\n"
    );
}

#[test]
fn coverage_threshold_rows_and_manifest() {
    let dir = workdir();
    let th = fixture("inequality.tsv");
    ok(&embeval(
        &[
            "coverage",
            "--model",
            "a.vec",
            "--model",
            "b.vec",
            "--thesaurus",
            th.to_str().unwrap(),
            "--s",
            "1.0",
            "--s",
            "0.95",
            "--s",
            "0.9",
            "--out",
            "out",
        ],
        dir.path(),
    ));
    let out = dir.path().join("out");
    let md = read(&out, "coverage.md");
    let rows: Vec<&str> = md
        .lines()
        .filter(|l| l.starts_with("| ") && !l.starts_with("| ---"))
        .collect();
    assert_eq!(rows.len(), 5, "{md}");
    assert!(rows[1].starts_with("| Vocab size |"));
    assert!(rows[2].starts_with("| s=0.9 |"));
    assert!(rows[4].starts_with("| s=1.0 |"));
    let m: Value = serde_json::from_str(&read(&out, "coverage.manifest.json")).unwrap();
    assert_eq!(m["command"], "coverage");
    assert_eq!(m["inputs"].as_array().unwrap().len(), 3);
    assert!(m["inputs"]
        .as_array()
        .unwrap()
        .iter()
        .all(|i| i["sha256"].as_str().unwrap().len() == 64));
    assert_eq!(m["params"]["s"], serde_json::json!([0.9, 0.95, 1.0]));
}

#[test]
fn argument_errors_exit_2_before_reading_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = embeval(
        &[
            "coverage",
            "--model",
            "missing.vec",
            "--thesaurus",
            "missing.nt",
            "--s",
            "1.5",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
    let out = embeval(
        &[
            "diversity",
            "--model",
            "a.vec",
            "--thesaurus",
            "t.nt",
            "--k",
            "5",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = embeval(
        &[
            "coverage",
            "--model",
            "a.vec",
            "--thesaurus",
            "t.ttl",
            "--s",
            "1",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = embeval(&["relations", "--model", "a.vec"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_3() {
    let dir = workdir();
    fs::write(dir.path().join("bad.vec"), "2 3\nx 1 2 3\ny 1 2\n").unwrap();
    let th = fixture("inequality.nt");
    let out = embeval(
        &[
            "coverage",
            "--model",
            "bad.vec",
            "--thesaurus",
            th.to_str().unwrap(),
            "--s",
            "1",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = embeval(&["neighbors", "--model", "a.vec", "--word", "nichtda"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn diversity_matrix_cache_and_blocks() {
    let dir = workdir();
    let th = fixture("inequality.nt");
    let args = [
        "diversity",
        "--model",
        "a.vec",
        "--model",
        "b.vec",
        "--thesaurus",
        th.to_str().unwrap(),
        "--k",
        "1",
        "--k",
        "2",
        "--k",
        "4",
        "--out",
        "out",
        "--cache-dir",
        "cache",
    ];
    ok(&embeval(&args, dir.path()));
    let out = dir.path().join("out");
    let first_md = read(&out, "diversity.md");
    let first_csv = read(&out, "diversity.csv");
    assert!(dir.path().join("cache/a.k4.tsv").exists());

    let csv: Vec<&str> = first_csv.lines().collect();
    assert_eq!(csv[0], "k,model,a,b");
    assert_eq!(csv.len(), 1 + 3 * 2);
    for block in csv[1..].chunks(2) {
        let a: Vec<&str> = block[0].split(',').collect();
        let b: Vec<&str> = block[1].split(',').collect();
        assert_eq!(a[2], "0.00");
        assert_eq!(b[3], "0.00");
        assert_eq!(a[3], b[2]);
    }
    assert_eq!(first_md.lines().filter(|l| l.contains(" - ")).count(), 6);

    ok(&embeval(&args, dir.path()));
    assert_eq!(read(&out, "diversity.md"), first_md);
    assert_eq!(read(&out, "diversity.csv"), first_csv);

    fs::write(dir.path().join("a.vec"), MODEL_A.replace("armut 1 0 0", "armut 1 1 0")).unwrap();
    let stale = embeval(&args, dir.path());
    assert_eq!(stale.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&stale.stderr).contains("--refresh"));
    let mut refresh = args.to_vec();
    refresh.push("--refresh");
    ok(&embeval(&refresh, dir.path()));
}

#[test]
fn relations_planted_values() {
    let dir = workdir();
    let th = fixture("inequality.nt");
    ok(&embeval(
        &[
            "relations",
            "--model",
            "a.vec",
            "--thesaurus",
            th.to_str().unwrap(),
            "--k",
            "1",
            "--k",
            "2",
            "--single-word-only",
            "--out",
            "out",
        ],
        dir.path(),
    ));
    let out = dir.path().join("out");
    // Single-word pairs: Armut related Benachteiligung (rank 2 in a) and
    // Armut altLabel Verarmung (rank 1). No broader/narrower pairs survive.
    assert_eq!(
        read(&out, "relations.csv"),
        "k,model,bro,nar,rel,alt\n1,a,0.00,0.00,0.00,100.00\n2,a,0.00,0.00,100.00,100.00\n"
    );
    let md = read(&out, "relations.md");
    assert!(md.starts_with("| top-k | Model | bro | nar | rel | alt |"));
    assert!(md.contains("| 1 | a | 0.00* | 0.00* | 0.00 | 100.00 |"), "{md}");
    assert!(md.contains("n=0"));
    let details = read(&out, "relations_details.csv");
    assert!(details.contains("1,a,bro,0,0,0,0.00"));
    let m: Value = serde_json::from_str(&read(&out, "relations.manifest.json")).unwrap();
    assert_eq!(m["summary"]["skipped_multi_word"], 6);
}

#[test]
fn neighbors_prints_descending_rows() {
    let dir = workdir();
    let out = embeval(
        &[
            "neighbors",
            "--model",
            "a.vec",
            "--word",
            "armut",
            "--k",
            "3",
            "--out",
            "nb",
        ],
        dir.path(),
    );
    ok(&out);
    let csv = read(&dir.path().join("nb"), "neighbors.csv");
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1], "verarmung");
    let scores: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    assert!(String::from_utf8_lossy(&out.stdout).contains("| 1 | verarmung |"));
    assert!(dir.path().join("nb/neighbors.manifest.json").exists());
}

#[test]
fn clean_then_stats() {
    let dir = tempfile::tempdir().unwrap();
    let docs = fixture("corpus/docs");
    let conf = fixture("corpus/pipeline.conf");
    ok(&embeval(
        &[
            "clean",
            "--input",
            docs.to_str().unwrap(),
            "--config",
            conf.to_str().unwrap(),
            "--out",
            "clean",
            "--corpus-name",
            "fx",
        ],
        dir.path(),
    ));
    let clean = dir.path().join("clean");
    for f in ["fx.de.txt", "fx.en.txt", "stats.csv", "clean.manifest.json"] {
        assert!(clean.join(f).exists(), "{f}");
    }
    let m: Value = serde_json::from_str(&read(&clean, "clean.manifest.json")).unwrap();
    assert_eq!(m["summary"]["duplicate_lines"], 4);
    assert_eq!(m["inputs"].as_array().unwrap().len(), 4);

    ok(&embeval(
        &[
            "stats",
            "--corpus",
            "clean/fx.de.txt",
            "--corpus",
            "clean/fx.en.txt",
            "--out",
            "st",
        ],
        dir.path(),
    ));
    // Recount from the corpus text itself.
    let mut expected = String::from("lang,tokens,vocabulary,files,megabytes\n");
    for lang in ["de", "en"] {
        let text = read(&clean, &format!("fx.{lang}.txt"));
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let vocab: std::collections::BTreeSet<&str> = tokens.iter().copied().collect();
        let mb = text.len() as f64 / (1024.0 * 1024.0);
        expected.push_str(&format!("{lang},{},{},1,{mb:.2}\n", tokens.len(), vocab.len()));
    }
    assert_eq!(read(&dir.path().join("st"), "stats.csv"), expected);
}
