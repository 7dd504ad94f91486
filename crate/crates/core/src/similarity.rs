//! Ratio string similarity and vocabulary best-match lookup.
//!
//! The distance used here is an edit distance where insertions and deletions
//! cost 1 and a substitution costs 2, which makes it equal to
//! `|a| + |b| - 2 * lcs(a, b)`. The ratio is
//!
//! ```text
//! ratio(a, b) = (|a| + |b| - d(a, b)) / (|a| + |b|)
//! ```
//!
//! with lengths counted in Unicode scalar values. Two empty strings have
//! ratio 1.
//!
//! [`LengthIndex::best_match`] scans a vocabulary for the token with the highest
//! ratio above a threshold `s`. Since `d(a, b) >= ||a| - |b||`, a candidate can
//! only reach `s` when `||a| - |b|| <= (1 - s)(|a| + |b|)`, so whole length
//! buckets are skipped; survivors run a banded DP that gives up as soon as the
//! distance exceeds the budget implied by `s`.

use std::collections::HashMap;

/// A vocabulary token matched to a keyword token.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioMatch {
    pub keyword_token: String,
    pub matched_vocab_token: String,
    pub vocab_index: usize,
    pub ratio: f64,
}

/// Edit distance with unit insert/delete and substitution cost 2.
pub fn edit_distance_sub2(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    distance_chars(&a, &b)
}

fn distance_chars(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let up = row[j + 1];
            let sub = if ca == cb { diag } else { diag + 2 };
            row[j + 1] = sub.min(up + 1).min(row[j] + 1);
            diag = up;
        }
    }
    row[b.len()]
}

const INF: usize = usize::MAX / 4;

/// Banded distance that returns `None` once it is certain to exceed `max`.
///
/// `prev` and `cur` are scratch rows reused between calls.
fn distance_bounded(a: &[char], b: &[char], max: usize, prev: &mut Vec<usize>, cur: &mut Vec<usize>) -> Option<usize> {
    let (la, lb) = (a.len(), b.len());
    if la.abs_diff(lb) > max {
        return None;
    }
    prev.clear();
    prev.extend((0..=lb).map(|j| if j <= max { j } else { INF }));
    cur.clear();
    cur.resize(lb + 1, INF);
    for i in 1..=la {
        let lo = i.saturating_sub(max);
        let hi = lb.min(i + max);
        cur.iter_mut().for_each(|c| *c = INF);
        let mut row_min = INF;
        if lo == 0 {
            cur[0] = i;
            row_min = i;
        }
        let ca = a[i - 1];
        for j in lo.max(1)..=hi {
            let sub = prev[j - 1] + if ca == b[j - 1] { 0 } else { 2 };
            let v = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if row_min > max {
            return None;
        }
        std::mem::swap(prev, cur);
    }
    let d = prev[lb];
    (d <= max).then_some(d)
}

fn ratio_from(distance: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        (total - distance) as f64 / total as f64
    }
}

/// Ratio similarity in `[0, 1]`; 1 exactly when the strings are equal.
pub fn ratio(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    ratio_from(distance_chars(&a, &b), a.len() + b.len())
}

/// Whether a ratio of at least `s` is possible for these lengths.
pub fn length_admissible(len_a: usize, len_b: usize, s: f64) -> bool {
    let total = (len_a + len_b) as f64;
    len_a.abs_diff(len_b) as f64 <= (1.0 - s) * total + 1e-9
}

fn check_threshold(s: f64) {
    assert!(s > 0.0 && s <= 1.0, "similarity threshold must lie in (0, 1], got {s}");
}

/// Unpruned reference scan: full DP against every vocabulary entry.
///
/// Returns the maximal ratio `>= s`, ties by lowest index. Panics if `s` is
/// outside `(0, 1]`.
pub fn best_match_scan<S: AsRef<str>>(vocab: &[S], token: &str, s: f64) -> Option<RatioMatch> {
    check_threshold(s);
    let a: Vec<char> = token.chars().collect();
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in vocab.iter().enumerate() {
        let b: Vec<char> = v.as_ref().chars().collect();
        let r = ratio_from(distance_chars(&a, &b), a.len() + b.len());
        if r >= s && best.is_none_or(|(br, _)| r > br) {
            best = Some((r, i));
        }
    }
    best.map(|(ratio, i)| RatioMatch {
        keyword_token: token.to_string(),
        matched_vocab_token: vocab[i].as_ref().to_string(),
        vocab_index: i,
        ratio,
    })
}

/// Vocabulary indexed by exact form and by length in characters.
#[derive(Debug, Clone)]
pub struct LengthIndex {
    tokens: Vec<String>,
    exact: HashMap<String, usize>,
    chars: Vec<char>,
    offsets: Vec<usize>,
    // by_len[n] holds indices of tokens with n chars, ascending.
    by_len: Vec<Vec<u32>>,
}

impl LengthIndex {
    pub fn new<I, S>(vocab: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = vocab.into_iter().map(Into::into).collect();
        let mut exact = HashMap::with_capacity(tokens.len());
        let mut chars = Vec::new();
        let mut offsets = Vec::with_capacity(tokens.len() + 1);
        let mut by_len: Vec<Vec<u32>> = Vec::new();
        offsets.push(0);
        for (i, t) in tokens.iter().enumerate() {
            exact.entry(t.clone()).or_insert(i);
            let before = chars.len();
            chars.extend(t.chars());
            let n = chars.len() - before;
            offsets.push(chars.len());
            if by_len.len() <= n {
                by_len.resize_with(n + 1, Vec::new);
            }
            by_len[n].push(i as u32);
        }
        LengthIndex {
            tokens,
            exact,
            chars,
            offsets,
            by_len,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.exact.contains_key(token)
    }

    fn chars_of(&self, i: usize) -> &[char] {
        &self.chars[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Best vocabulary match with ratio `>= s`, or `None`.
    ///
    /// An exact hit short-circuits; with `s == 1` nothing else can match, so
    /// the lookup is a single hash probe. Results are identical to
    /// [`best_match_scan`]. Panics if `s` is outside `(0, 1]`.
    pub fn best_match(&self, token: &str, s: f64) -> Option<RatioMatch> {
        check_threshold(s);
        if let Some(&i) = self.exact.get(token) {
            return Some(self.make_match(token, i, 1.0));
        }
        if s >= 1.0 {
            return None;
        }
        let a: Vec<char> = token.chars().collect();
        let la = a.len();
        let (mut prev, mut cur) = (Vec::new(), Vec::new());
        let mut best: Option<(f64, usize)> = None;
        for (lb, bucket) in self.by_len.iter().enumerate() {
            if bucket.is_empty() || !length_admissible(la, lb, s) {
                continue;
            }
            let total = la + lb;
            for &idx in bucket {
                let idx = idx as usize;
                let floor = best.map_or(s, |(r, _)| r.max(s));
                if !length_admissible(la, lb, floor) {
                    break;
                }
                let budget = ((1.0 - floor) * total as f64).floor() as usize + 1;
                let Some(d) = distance_bounded(&a, self.chars_of(idx), budget, &mut prev, &mut cur) else {
                    continue;
                };
                let r = ratio_from(d, total);
                if r < s {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((br, bi)) => r > br || (r == br && idx < bi),
                };
                if better {
                    best = Some((r, idx));
                }
            }
        }
        best.map(|(r, i)| self.make_match(token, i, r))
    }

    fn make_match(&self, token: &str, i: usize, ratio: f64) -> RatioMatch {
        RatioMatch {
            keyword_token: token.to_string(),
            matched_vocab_token: self.tokens[i].clone(),
            vocab_index: i,
            ratio,
        }
    }
}
