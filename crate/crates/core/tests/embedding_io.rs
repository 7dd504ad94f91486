use std::io::BufReader;

use embeval_core::{EmbeddingModel, Error, LoadOptions, Model, Model64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(seed: u64, n: usize, dim: usize) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<(String, Vec<f32>)> = (0..n)
        .map(|i| {
            let v = (0..dim).map(|_| rng.gen_range(-2.0f32..2.0)).collect();
            (format!("wort{i}"), v)
        })
        .collect();
    EmbeddingModel::from_rows("random", dim, rows).unwrap()
}

#[test]
fn file_round_trip_100_words() {
    let model = random_model(7, 100, 50);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("random.vec");
    model.write_vec_file(&path).unwrap();
    let back = Model::load_vec_file(&path, None, LoadOptions::default()).unwrap();
    assert_eq!(back.name(), "random");
    assert_eq!(back.vocab(), model.vocab());
    for i in 0..model.len() {
        for (a, b) in model.row(i).iter().zip(back.row(i)) {
            assert!((a - b).abs() <= 1e-5 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
    // Writing the reloaded model reproduces the same bytes.
    let mut first = Vec::new();
    back.write_vec(&mut first).unwrap();
    let again = Model::load_vec(BufReader::new(&first[..]), "x", LoadOptions::default()).unwrap();
    let mut second = Vec::new();
    again.write_vec(&mut second).unwrap();
    assert_eq!(first, second);
}

#[test]
fn f64_models_load_the_same_text() {
    let text = "2 3\nsozial 0.5 -1 2\nmacht 1e-3 0 4\n";
    let m = Model64::load_vec(BufReader::new(text.as_bytes()), "m", LoadOptions::default()).unwrap();
    assert_eq!(m.vector("macht").unwrap(), &[0.001, 0.0, 4.0]);
}

#[test]
fn errors_carry_line_numbers() {
    let text = "2 3\na 1 2 3\nb 1 2\n";
    match Model::load_vec(BufReader::new(text.as_bytes()), "m", LoadOptions::default()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    let missing = Model::load_vec_file(std::path::Path::new("/nonexistent/x.vec"), None, LoadOptions::default());
    assert!(matches!(missing, Err(Error::File { .. })));
}
