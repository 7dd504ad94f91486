//! Text cleaning steps applied to extracted document text.

use std::sync::OnceLock;

use log::warn;
use regex::Regex;

use super::numerals;

fn is_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}')
}

/// Removes everything up to and including the first line matching
/// `delimiter` (compiled in multi-line mode by the caller or here).
///
/// Returns the text and whether a delimiter was found. Without a match the
/// text comes back unchanged and a warning is logged.
pub fn strip_cover(text: &str, delimiter: &Regex) -> (String, bool) {
    match delimiter.find(text) {
        Some(m) => {
            let rest = &text[m.end()..];
            let rest = rest
                .strip_prefix("\r\n")
                .or_else(|| rest.strip_prefix('\n'))
                .unwrap_or(rest);
            (rest.to_string(), true)
        }
        None => {
            warn!("cover delimiter {:?} not found; text kept whole", delimiter.as_str());
            (text.to_string(), false)
        }
    }
}

/// Compiles a cover delimiter pattern with `^`/`$` anchored at lines.
pub fn cover_regex(pattern: &str) -> Result<Regex, regex::Error> {
    Regex::new(&format!("(?m){pattern}"))
}

/// Joins words hyphenated across a line break, turns remaining line breaks
/// into spaces and intra-word hyphens into spaces. Soft hyphens are dropped.
pub fn dehyphenate(text: &str) -> String {
    let chars: Vec<char> = text.chars().filter(|&c| c != '\u{ad}').collect();
    let mut joined: Vec<char> = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if is_hyphen(c) && joined.last().is_some_and(|p| p.is_alphabetic()) {
            let mut j = i + 1;
            if chars.get(j) == Some(&'\r') {
                j += 1;
            }
            if chars.get(j) == Some(&'\n') {
                j += 1;
                while matches!(chars.get(j), Some(' ' | '\t')) {
                    j += 1;
                }
                if chars.get(j).is_some_and(|n| n.is_alphabetic()) {
                    i = j;
                    continue;
                }
            }
        }
        joined.push(match c {
            '\n' | '\r' => ' ',
            other => other,
        });
        i += 1;
    }
    split_hyphens_in(&mut joined);
    joined.into_iter().collect()
}

fn split_hyphens_in(chars: &mut [char]) {
    for i in 1..chars.len().saturating_sub(1) {
        if is_hyphen(chars[i]) && chars[i - 1].is_alphanumeric() && chars[i + 1].is_alphanumeric() {
            chars[i] = ' ';
        }
    }
}

/// Replaces hyphens between two alphanumerics by spaces.
pub fn split_intraword_hyphens(text: &str) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    split_hyphens_in(&mut chars);
    chars.into_iter().collect()
}

fn camel_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(\p{Ll})(\p{Lu})").expect("valid regex"))
}

/// Inserts a space at every lowercase-to-uppercase boundary.
pub fn split_camel_case(text: &str) -> String {
    camel_regex().replace_all(text, "$1 $2").into_owned()
}

/// Characters detached from word edges by the tokenizer.
pub fn is_edge_punct(c: char) -> bool {
    matches!(
        c,
        '.' | ','
            | '('
            | ')'
            | '['
            | ']'
            | '"'
            | '\''
            | ':'
            | ';'
            | '?'
            | '!'
            | '„'
            | '“'
            | '”'
            | '‚'
            | '‘'
            | '’'
            | '«'
            | '»'
    )
}

fn is_closer(c: char) -> bool {
    matches!(c, ')' | ']' | '"' | '\'' | '“' | '”' | '’' | '«' | '»')
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Byte spans of the tokens [`tokenize`] would produce.
fn token_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    for (start, chunk) in chunks_with_offsets(text) {
        let lead = chunk.len() - chunk.trim_start_matches(is_edge_punct).len();
        let core_len = chunk[lead..].trim_end_matches(is_edge_punct).len();
        for (i, c) in chunk[..lead].char_indices() {
            spans.push((start + i, start + i + c.len_utf8()));
        }
        if core_len > 0 {
            spans.push((start + lead, start + lead + core_len));
        }
        let trail = start + lead + core_len;
        for (i, c) in text[trail..start + chunk.len()].char_indices() {
            spans.push((trail + i, trail + i + c.len_utf8()));
        }
    }
    spans
}

/// Splits running text into sentences.
///
/// Boundaries are decided on tokens: a sentence ends after a `.`, `!` or `?`
/// token together with any closing quotes, brackets or further terminal
/// marks that follow it. Splitting therefore agrees before and after
/// tokenization. Returned sentences are slices of the input.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let spans = token_spans(text);
    let single = |&(s, e): &(usize, usize)| -> Option<char> {
        let mut it = text[s..e].chars();
        let c = it.next()?;
        it.next().is_none().then_some(c)
    };
    let mut out = Vec::new();
    let mut first = 0;
    let mut ended = false;
    for (i, span) in spans.iter().enumerate() {
        let c = single(span);
        if ended && !c.is_some_and(|c| is_closer(c) || is_terminal(c)) {
            out.push(&text[spans[first].0..spans[i - 1].1]);
            first = i;
            ended = false;
        }
        if c.is_some_and(is_terminal) {
            ended = true;
        }
    }
    if first < spans.len() {
        out.push(&text[spans[first].0..spans[spans.len() - 1].1]);
    }
    out
}

/// Collapses whitespace runs to one space, trims, and lowercases.
pub fn normalize_ws_lower(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, w) in text.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&w.to_lowercase());
    }
    out
}

/// Splits on whitespace and detaches leading and trailing punctuation marks,
/// one token per mark.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let start = chunk.len() - chunk.trim_start_matches(is_edge_punct).len();
        let lead = &chunk[..start];
        let rest = &chunk[start..];
        let core = rest.trim_end_matches(is_edge_punct);
        let trail = &rest[core.len()..];
        tokens.extend(lead.chars().map(String::from));
        if !core.is_empty() {
            tokens.push(core.to_string());
        }
        tokens.extend(trail.chars().map(String::from));
    }
    tokens
}

/// Replaces integer tokens (0..=999,999, no leading zeros) with numeral
/// words. Edge punctuation around a number is kept in place; other numeric
/// shapes are left alone. Languages without a numeral table pass through.
pub fn numbers_to_words(text: &str, lang: &str) -> String {
    let convert: fn(u32) -> Option<String> = match lang {
        "de" => numerals::german,
        "en" => numerals::english,
        _ => return text.to_string(),
    };
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for (start, chunk) in chunks_with_offsets(text) {
        let lead = chunk.len() - chunk.trim_start_matches(is_edge_punct).len();
        let core = chunk[lead..].trim_end_matches(is_edge_punct);
        if !is_canonical_integer(core) {
            continue;
        }
        let Some(words) = core.parse().ok().and_then(convert) else {
            continue;
        };
        let core_start = start + lead;
        out.push_str(&text[last..core_start]);
        out.push_str(&words);
        last = core_start + core.len();
    }
    out.push_str(&text[last..]);
    out
}

fn is_canonical_integer(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0')) && s.len() <= 6
}

fn chunks_with_offsets(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = text.as_ptr() as usize;
    text.split_whitespace().map(move |w| (w.as_ptr() as usize - base, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cover_stripping() {
        let re = cover_regex("^---$").unwrap();
        assert_eq!(strip_cover("COVER\n---\nbody", &re), ("body".to_string(), true));
        assert_eq!(strip_cover("just text", &re), ("just text".to_string(), false));
        assert_eq!(strip_cover("---\nall body\nhere", &re).0, "all body\nhere");
    }

    #[test]
    fn dehyphenation() {
        assert_eq!(dehyphenate("Sozial-\nwissenschaft"), "Sozialwissenschaft");
        assert_eq!(dehyphenate("Sozial-\r\n   wissenschaft"), "Sozialwissenschaft");
        assert_eq!(dehyphenate("Nord-Süd"), "Nord Süd");
        assert_eq!(dehyphenate("a-b-c"), "a b c");
        assert_eq!(dehyphenate("zwei\nZeilen"), "zwei Zeilen");
        assert_eq!(dehyphenate("Ende -\nAnfang"), "Ende - Anfang");
        assert_eq!(dehyphenate("Ab\u{ad}satz"), "Absatz");
    }

    #[test]
    fn camel_case() {
        assert_eq!(split_camel_case("SozialStaat"), "Sozial Staat");
        assert_eq!(split_camel_case("NATO"), "NATO");
        assert_eq!(split_camel_case("onePageTwoWords"), "one Page Two Words");
        assert_eq!(split_camel_case("ÜberÄnderung"), "Über Änderung");
    }

    #[test]
    fn whitespace_and_case() {
        assert_eq!(normalize_ws_lower("A  B"), "a b");
        assert_eq!(normalize_ws_lower("ÜBER"), "über");
        assert_eq!(normalize_ws_lower("  x\t\ty \n"), "x y");
    }

    #[test]
    fn tokenization() {
        assert_eq!(tokenize("soziale ungleichheit."), ["soziale", "ungleichheit", "."]);
        assert_eq!(tokenize("(macht)"), ["(", "macht", ")"]);
        assert_eq!(
            tokenize("version 2.1, z.b. \"so\"!"),
            ["version", "2.1", ",", "z.b", ".", "\"", "so", "\"", "!"]
        );
        assert_eq!(tokenize("..."), [".", ".", "."]);
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn numbers() {
        assert_eq!(numbers_to_words("5 Thesen", "de"), "fünf Thesen");
        assert_eq!(numbers_to_words("version 2.1", "en"), "version 2.1");
        assert_eq!(numbers_to_words("42 items", "en"), "forty-two items");
        assert_eq!(
            numbers_to_words("Es gibt 5. Und (12)", "de"),
            "Es gibt fünf. Und (zwölf)"
        );
        assert_eq!(
            numbers_to_words("007 1000000 12.05.2020 3a", "en"),
            "007 1000000 12.05.2020 3a"
        );
        assert_eq!(numbers_to_words("5 x", "fr"), "5 x");
    }

    #[test]
    fn sentences() {
        assert_eq!(
            split_sentences("Erstens. Zweitens! (Drittens.) Vier"),
            ["Erstens.", "Zweitens!", "(Drittens.)", "Vier"]
        );
        assert_eq!(split_sentences("a b . ( c . ) d"), ["a b .", "( c . )", "d"]);
        assert_eq!(split_sentences("warte... was"), ["warte...", "was"]);
        assert_eq!(split_sentences("warte . . . was"), ["warte . . .", "was"]);
        assert_eq!(split_sentences("x. .y"), ["x. .", "y"]);
        assert!(split_sentences("  ").is_empty());
    }

    fn text() -> impl Strategy<Value = String> {
        proptest::string::string_regex("[a-zA-ZäÖß0-9 \\-\n\r\t.,()!?\u{ad}]{0,60}").unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn dehyphenate_idempotent(t in text()) {
            let once = dehyphenate(&t);
            prop_assert_eq!(dehyphenate(&once), once);
        }

        #[test]
        fn normalize_idempotent(t in text()) {
            let once = normalize_ws_lower(&t);
            prop_assert_eq!(normalize_ws_lower(&once), once.clone());
            prop_assert!(!once.contains("  "));
        }

        #[test]
        fn camel_idempotent(t in text()) {
            let once = split_camel_case(&t);
            prop_assert_eq!(split_camel_case(&once), once);
        }

        #[test]
        fn tokenize_round_trip(t in text()) {
            let tokens = tokenize(&t);
            prop_assert!(tokens.iter().all(|t| !t.is_empty()));
            prop_assert_eq!(tokenize(&tokens.join(" ")), tokens);
        }

        #[test]
        fn sentence_split_stable_under_tokenization(t in text()) {
            let once: Vec<String> = split_sentences(&t).iter().map(|s| tokenize(s).join(" ")).collect();
            let again: Vec<String> = split_sentences(&once.join(" ")).iter().map(|s| tokenize(s).join(" ")).collect();
            prop_assert_eq!(again, once);
        }
    }
}
