//! Word-embedding models in the word-vector text format.
//!
//! The format is the one emitted by fastText and word2vec in text mode:
//!
//! ```text
//! <count> <dim>\n
//! <token> <x_1> ... <x_dim>\n
//! ...
//! ```
//!
//! The reader accepts any decimal or scientific literal and tolerates a
//! trailing space or CR at the end of a line (fastText writes one). The writer
//! emits single-space separated `%g` literals with six significant digits and
//! no trailing whitespace.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::scalar::{format_g6, norm, Scalar};

/// Loader behaviour switches.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Keep the first occurrence of a repeated token and warn, instead of
    /// failing.
    pub keep_first_duplicate: bool,
}

/// Vocabulary plus a row-major vector matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel<T> {
    name: String,
    dim: usize,
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    matrix: Vec<T>,
    zero_rows: Vec<usize>,
    normalized: bool,
}

impl<T: Scalar> EmbeddingModel<T> {
    /// Builds a model from in-memory rows.
    pub fn from_rows<S, I>(name: impl Into<String>, dim: usize, rows: I) -> Result<Self>
    where
        S: Into<String>,
        I: IntoIterator<Item = (S, Vec<T>)>,
    {
        if dim == 0 {
            return Err(Error::Invariant("dimension must be positive".into()));
        }
        let mut model = Self::empty(name.into(), dim);
        for (i, (token, row)) in rows.into_iter().enumerate() {
            let token = token.into();
            validate_token(&token).map_err(|m| Error::parse(i + 1, m))?;
            if row.len() != dim {
                return Err(Error::LengthMismatch(row.len(), dim));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::parse(i + 1, format!("non-finite component for {token:?}")));
            }
            if let Some(&first) = model.index.get(&token) {
                return Err(Error::DuplicateToken {
                    line: i + 1,
                    token,
                    first: first + 1,
                });
            }
            model.push(token, &row);
        }
        Ok(model)
    }

    fn empty(name: String, dim: usize) -> Self {
        EmbeddingModel {
            name,
            dim,
            vocab: Vec::new(),
            index: HashMap::new(),
            matrix: Vec::new(),
            zero_rows: Vec::new(),
            normalized: false,
        }
    }

    fn push(&mut self, token: String, row: &[T]) {
        let idx = self.vocab.len();
        if row.iter().all(|x| x.is_zero()) {
            self.zero_rows.push(idx);
        }
        self.index.insert(token.clone(), idx);
        self.vocab.push(token);
        self.matrix.extend_from_slice(row);
    }

    /// Reads a model from a word-vector text stream.
    pub fn load_vec<R: BufRead>(source: R, name: impl Into<String>, opts: LoadOptions) -> Result<Self> {
        let mut lines = source.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(Error::EmptyInput),
        };
        let (count, dim) = parse_header(&header)?;
        let mut model = Self::empty(name.into(), dim);
        model.vocab.reserve(count);
        model.matrix.reserve(count.saturating_mul(dim));

        let mut row: Vec<T> = Vec::with_capacity(dim);
        let mut records = 0usize;
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                return Err(Error::parse(lineno, "empty line"));
            }
            let mut fields = line.split_ascii_whitespace();
            let token = fields.next().expect("non-empty line has a field");
            row.clear();
            for field in fields {
                let x: T = field
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("invalid number {field:?}")))?;
                if !x.is_finite() {
                    return Err(Error::parse(lineno, format!("non-finite number {field:?}")));
                }
                row.push(x);
            }
            if row.len() != dim {
                return Err(Error::parse(
                    lineno,
                    format!("expected {dim} components for {token:?}, found {}", row.len()),
                ));
            }
            records += 1;
            if records > count {
                return Err(Error::CountMismatch {
                    declared: count,
                    found: records,
                });
            }
            if let Some(&first) = model.index.get(token) {
                if opts.keep_first_duplicate {
                    warn!(
                        "line {lineno}: duplicate token {token:?} ignored (first on line {})",
                        first + 2
                    );
                    continue;
                }
                return Err(Error::DuplicateToken {
                    line: lineno,
                    token: token.to_string(),
                    first: first + 2,
                });
            }
            model.push(token.to_string(), &row);
        }
        if records != count {
            return Err(Error::CountMismatch {
                declared: count,
                found: records,
            });
        }
        if !model.zero_rows.is_empty() {
            warn!(
                "model {:?}: {} zero vector(s) will be excluded from neighborhoods",
                model.name,
                model.zero_rows.len()
            );
        }
        Ok(model)
    }

    /// Reads a model from a file; the model name defaults to the file stem.
    pub fn load_vec_file(path: &Path, name: Option<&str>, opts: LoadOptions) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::file(path, e))?;
        let name = name.map(str::to_string).unwrap_or_else(|| model_name_from_path(path));
        Self::load_vec(BufReader::with_capacity(1 << 20, file), name, opts)
    }

    /// Writes the model in the word-vector text format.
    pub fn write_vec<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.vocab.len(), self.dim)?;
        let mut line = String::new();
        for (i, token) in self.vocab.iter().enumerate() {
            line.clear();
            line.push_str(token);
            for &x in self.row(i) {
                line.push(' ');
                line.push_str(&format_g6(x));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_vec_file(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::file(path, e))?;
        self.write_vec(BufWriter::new(file))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Exact, case-sensitive vocabulary membership.
    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// The stored row for `token`.
    pub fn vector(&self, token: &str) -> Result<&[T]> {
        self.index_of(token)
            .map(|i| self.row(i))
            .ok_or_else(|| Error::UnknownToken(token.to_string()))
    }

    /// Row `i` of the matrix. Panics if out of range.
    pub fn row(&self, i: usize) -> &[T] {
        &self.matrix[i * self.dim..(i + 1) * self.dim]
    }

    /// Indices of all-zero rows, ascending.
    pub fn zero_rows(&self) -> &[usize] {
        &self.zero_rows
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.zero_rows.binary_search(&i).is_ok()
    }

    /// Copy with every nonzero row scaled to unit length.
    ///
    /// Zero rows stay zero and remain listed in [`zero_rows`](Self::zero_rows).
    pub fn normalize_rows(&self) -> Self {
        let mut out = self.clone();
        for row in out.matrix.chunks_exact_mut(self.dim) {
            let n = norm(row);
            if !n.is_zero() {
                row.iter_mut().for_each(|x| *x = *x / n);
            }
        }
        out.normalized = true;
        out
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Model name derived from a path: the file name minus its last extension,
/// so `corpus.100.vec` becomes `corpus.100`.
pub fn model_name_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let line = line.strip_prefix('\u{feff}').unwrap_or(line).trim_end();
    let mut parts = line.split_ascii_whitespace();
    let (Some(count), Some(dim), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::parse(
            1,
            format!("malformed header {line:?}, expected \"<count> <dim>\""),
        ));
    };
    let count: usize = count
        .parse()
        .map_err(|_| Error::parse(1, format!("invalid vector count {count:?}")))?;
    let dim: usize = dim
        .parse()
        .map_err(|_| Error::parse(1, format!("invalid dimension {dim:?}")))?;
    if dim == 0 {
        return Err(Error::parse(1, "dimension must be positive"));
    }
    Ok((count, dim))
}

fn validate_token(token: &str) -> std::result::Result<(), String> {
    if token.is_empty() {
        Err("empty token".into())
    } else if token.chars().any(char::is_whitespace) {
        Err(format!("token {token:?} contains whitespace"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<EmbeddingModel<f64>> {
        EmbeddingModel::load_vec(text.as_bytes(), "m", LoadOptions::default())
    }

    #[test]
    fn header_echo() {
        let m = load("3 4\na 1 2 3 4\nb 0 0 0 1\nc 1e-3 -2.5 0 0\n").unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.dim(), 4);
        assert_eq!(m.vocab(), ["a", "b", "c"]);
        assert_eq!(m.vector("c").unwrap(), [1e-3, -2.5, 0.0, 0.0]);
    }

    #[test]
    fn duplicate_token_names_line() {
        let err = load("2 3\nhaus 0.1 0.2 0.3\nhaus 0.0 0.0 1.0\n").unwrap_err();
        match err {
            Error::DuplicateToken { line, token, first } => {
                assert_eq!((line, token.as_str(), first), (3, "haus", 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn keep_first_downgrades_duplicates() {
        let opts = LoadOptions {
            keep_first_duplicate: true,
        };
        let m: EmbeddingModel<f32> =
            EmbeddingModel::load_vec("2 3\nhaus 0.1 0.2 0.3\nhaus 0 0 1\n".as_bytes(), "m", opts).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.vector("haus").unwrap(), [0.1, 0.2, 0.3]);
    }

    #[test]
    fn wrong_component_count_reports_line() {
        let err = load("2 2\na 1 2\nb 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(load("3\n").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(load("x 2\n").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(load("1 0\n").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(load("").unwrap_err(), Error::EmptyInput));
    }

    #[test]
    fn count_mismatch_at_eof() {
        let err = load("3 1\na 1\nb 2\n").unwrap_err();
        assert!(matches!(err, Error::CountMismatch { declared: 3, found: 2 }));
        let err = load("1 1\na 1\nb 2\n").unwrap_err();
        assert!(matches!(err, Error::CountMismatch { declared: 1, found: 2 }));
    }

    #[test]
    fn tolerates_fasttext_trailing_space_and_crlf() {
        let m = load("1 2\r\nwort 0.5 -0.5 \r\n").unwrap();
        assert_eq!(m.vector("wort").unwrap(), [0.5, -0.5]);
    }

    #[test]
    fn contains_is_case_sensitive() {
        let m = load("1 1\nmacht 1\n").unwrap();
        assert!(m.contains("macht"));
        assert!(!m.contains("Macht"));
        assert!(!m.contains("staat"));
        assert!(matches!(m.vector("staat"), Err(Error::UnknownToken(_))));
    }

    #[test]
    fn normalize_rows_scales_and_flags_zero() {
        let m = load("3 2\na 3 4\nz 0 0\nu 1 0\n").unwrap();
        assert_eq!(m.zero_rows(), [1]);
        let n = m.normalize_rows();
        assert!(n.is_normalized());
        let a = n.vector("a").unwrap();
        assert!((a[0] - 0.6).abs() < 1e-12 && (a[1] - 0.8).abs() < 1e-12);
        assert_eq!(n.vector("z").unwrap(), [0.0, 0.0]);
        assert_eq!(n.vector("u").unwrap(), [1.0, 0.0]);
        assert!(n.is_zero_row(1));
        for i in [0, 2] {
            assert!((norm(n.row(i)) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn writer_output_is_canonical() {
        let m = load("2 3\nx 0.5 1e-7 -3\ny 1234567 0 0.1234567\n").unwrap();
        let mut buf = Vec::new();
        m.write_vec(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "2 3\nx 0.5 1e-07 -3\ny 1.23457e+06 0 0.123457\n"
        );
    }

    #[test]
    fn from_rows_rejects_bad_tokens() {
        assert!(EmbeddingModel::<f64>::from_rows("m", 1, [("a b", vec![1.0])]).is_err());
        assert!(EmbeddingModel::<f64>::from_rows("m", 1, [("", vec![1.0])]).is_err());
        assert!(EmbeddingModel::<f64>::from_rows("m", 2, [("a", vec![1.0])]).is_err());
    }

    #[test]
    fn name_from_path_drops_last_extension() {
        assert_eq!(model_name_from_path(Path::new("/x/corpus.100.vec")), "corpus.100");
    }
}
