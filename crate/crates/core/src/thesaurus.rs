//! SKOS thesaurus loading and indexing.
//!
//! Two input formats carry the same content:
//!
//! - an N-Triples subset: `<subject> <predicate> <object> .` lines where the
//!   predicate is one of the SKOS `prefLabel`, `altLabel`, `broader`,
//!   `narrower` or `related` IRIs; other predicates are skipped and counted;
//! - a TSV file with header `subject predicate object lang`, where the
//!   predicate is a short SKOS name (or the full IRI).
//!
//! A concept exists once it has at least one language-tagged label. A concept
//! with a `prefLabel` is a descriptor. Broader and narrower edges are closed
//! under inversion on insert.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SKOS_NS: &str = "http://www.w3.org/2004/02/skos/core#";

/// Relation types evaluated by relational coverage, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationType {
    Broader,
    Narrower,
    Related,
    AltLabel,
}

impl RelationType {
    pub const ALL: [RelationType; 4] = [
        RelationType::Broader,
        RelationType::Narrower,
        RelationType::Related,
        RelationType::AltLabel,
    ];

    /// SKOS local name.
    pub fn skos_name(self) -> &'static str {
        match self {
            RelationType::Broader => "broader",
            RelationType::Narrower => "narrower",
            RelationType::Related => "related",
            RelationType::AltLabel => "altLabel",
        }
    }

    /// Three-letter column label used in report tables.
    pub fn short(self) -> &'static str {
        match self {
            RelationType::Broader => "bro",
            RelationType::Narrower => "nar",
            RelationType::Related => "rel",
            RelationType::AltLabel => "alt",
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.skos_name())
    }
}

impl FromStr for RelationType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "broader" | "bro" => Ok(RelationType::Broader),
            "narrower" | "nar" => Ok(RelationType::Narrower),
            "related" | "rel" => Ok(RelationType::Related),
            "altLabel" | "alt" => Ok(RelationType::AltLabel),
            _ => Err(format!("unknown relation type {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Predicate {
    PrefLabel,
    AltLabel,
    Broader,
    Narrower,
    Related,
}

impl Predicate {
    fn from_local(name: &str) -> Option<Self> {
        Some(match name {
            "prefLabel" => Predicate::PrefLabel,
            "altLabel" => Predicate::AltLabel,
            "broader" => Predicate::Broader,
            "narrower" => Predicate::Narrower,
            "related" => Predicate::Related,
            _ => return None,
        })
    }

    fn from_iri(iri: &str) -> Option<Self> {
        iri.strip_prefix(SKOS_NS).and_then(Self::from_local)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub text: String,
    pub lang: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Concept {
    pub id: String,
    pub pref_labels: Vec<Label>,
    pub alt_labels: Vec<Label>,
}

impl Concept {
    pub fn is_descriptor(&self) -> bool {
        !self.pref_labels.is_empty()
    }

    /// First preferred label in `lang`.
    pub fn pref_label(&self, lang: &str) -> Option<&str> {
        self.pref_labels
            .iter()
            .find(|l| l.lang == lang)
            .map(|l| l.text.as_str())
    }

    fn add_label(&mut self, label: Label, pref: bool) {
        let list = if pref {
            &mut self.pref_labels
        } else {
            &mut self.alt_labels
        };
        if !list.contains(&label) {
            list.push(label);
        }
    }
}

/// Counts of input the parsers did not turn into content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseReport {
    pub triples: usize,
    pub skipped_predicates: usize,
    pub untagged_labels: usize,
}

/// An immutable, indexed thesaurus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Thesaurus {
    concepts: BTreeMap<String, Concept>,
    // Edges between concept ids, per relation type (altLabel is kept on the concept).
    edges: BTreeMap<RelationType, BTreeSet<(String, String)>>,
    report: ParseReportCmp,
}

// Parse statistics are not part of thesaurus identity.
#[derive(Debug, Clone, Default)]
struct ParseReportCmp(ParseReport);

impl PartialEq for ParseReportCmp {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for ParseReportCmp {}

/// One descriptor paired with a related concept label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DescriptorPair {
    pub descriptor_label: String,
    pub concept_label: String,
    pub relation: RelationType,
    pub lang: String,
}

/// Pairs plus the reasons candidates were dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairSelection {
    pub pairs: Vec<DescriptorPair>,
    /// Edges whose endpoints lack a label in the requested language.
    pub missing_label: usize,
    /// Pairs dropped because a label has more than one word.
    pub multi_word: usize,
}

/// A thesaurus label with its whitespace tokens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Keyword {
    pub label: String,
    pub tokens: Vec<String>,
}

impl Keyword {
    pub fn new(label: impl Into<String>) -> Self {
        let label = label.into();
        let tokens = label.split_whitespace().map(str::to_string).collect();
        Keyword { label, tokens }
    }
}

/// Multi-word means whitespace inside the trimmed label. Hyphenated tokens
/// count as one word.
pub fn is_multi_word(label: &str) -> bool {
    label.trim().contains(char::is_whitespace)
}

impl Thesaurus {
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn parse_report(&self) -> ParseReport {
        self.report.0
    }

    /// Edge targets of `source` for a concept relation. Empty for altLabel.
    pub fn targets(&self, source: &str, rel: RelationType) -> Vec<&str> {
        self.edges
            .get(&rel)
            .map(|set| {
                set.range((source.to_string(), String::new())..)
                    .take_while(|(s, _)| s == source)
                    .map(|(_, t)| t.as_str())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn has_edge(&self, source: &str, rel: RelationType, target: &str) -> bool {
        self.edges
            .get(&rel)
            .is_some_and(|set| set.contains(&(source.to_string(), target.to_string())))
    }

    pub fn edge_count(&self, rel: RelationType) -> usize {
        match rel {
            RelationType::AltLabel => self.concepts.values().map(|c| c.alt_labels.len()).sum(),
            _ => self.edges.get(&rel).map_or(0, BTreeSet::len),
        }
    }

    fn add_label(&mut self, subject: &str, label: Label, pref: bool) {
        self.concepts
            .entry(subject.to_string())
            .or_insert_with(|| Concept {
                id: subject.to_string(),
                ..Concept::default()
            })
            .add_label(label, pref);
    }

    fn add_edge(&mut self, source: &str, rel: RelationType, target: &str) {
        let mut insert = |rel, s: &str, t: &str| {
            self.edges
                .entry(rel)
                .or_default()
                .insert((s.to_string(), t.to_string()));
        };
        insert(rel, source, target);
        match rel {
            RelationType::Broader => insert(RelationType::Narrower, target, source),
            RelationType::Narrower => insert(RelationType::Broader, target, source),
            _ => {}
        }
    }

    fn apply(&mut self, subject: &str, pred: Predicate, object: Object) -> std::result::Result<(), String> {
        match (pred, object) {
            (Predicate::PrefLabel | Predicate::AltLabel, Object::Literal { text, lang }) => {
                match lang.and_then(|l| normalize_lang(&l)) {
                    Some(lang) => self.add_label(subject, Label { text, lang }, pred == Predicate::PrefLabel),
                    None => self.report.0.untagged_labels += 1,
                }
                Ok(())
            }
            (Predicate::Broader | Predicate::Narrower | Predicate::Related, Object::Resource(target)) => {
                let rel = match pred {
                    Predicate::Broader => RelationType::Broader,
                    Predicate::Narrower => RelationType::Narrower,
                    _ => RelationType::Related,
                };
                self.add_edge(subject, rel, &target);
                Ok(())
            }
            (Predicate::PrefLabel | Predicate::AltLabel, Object::Resource(_)) => {
                Err("label predicate needs a literal object".into())
            }
            (_, Object::Literal { .. }) => Err("relation predicate needs a resource object".into()),
        }
    }

    /// Parses the N-Triples subset described in the module docs.
    pub fn parse_ntriples<R: BufRead>(source: R) -> Result<Self> {
        let mut th = Thesaurus::default();
        let mut saw_content = false;
        for (i, line) in source.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            saw_content = true;
            let (subject, predicate, object) = parse_triple(line).map_err(|m| Error::parse(lineno, m))?;
            th.report.0.triples += 1;
            let Some(pred) = Predicate::from_iri(&predicate) else {
                th.report.0.skipped_predicates += 1;
                continue;
            };
            th.apply(&subject, pred, object).map_err(|m| Error::parse(lineno, m))?;
        }
        if !saw_content {
            return Err(Error::EmptyInput);
        }
        Ok(th)
    }

    /// Parses the TSV form: `subject TAB predicate TAB object TAB lang`.
    pub fn parse_tsv<R: BufRead>(source: R) -> Result<Self> {
        let mut lines = source.lines();
        let header = match lines.next() {
            Some(l) => l?,
            None => return Err(Error::EmptyInput),
        };
        let header = header.trim_end_matches('\r');
        let cols: Vec<&str> = header.split('\t').map(str::trim).collect();
        if cols != ["subject", "predicate", "object", "lang"] {
            return Err(Error::parse(
                1,
                format!("expected header subject/predicate/object/lang, found {header:?}"),
            ));
        }
        let mut th = Thesaurus::default();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [subject, predicate, object, lang] = fields[..] else {
                return Err(Error::parse(
                    lineno,
                    format!("expected 4 columns, found {}", fields.len()),
                ));
            };
            let pred = Predicate::from_local(predicate)
                .or_else(|| Predicate::from_iri(predicate))
                .ok_or_else(|| Error::parse(lineno, format!("unknown predicate {predicate:?}")))?;
            th.report.0.triples += 1;
            let object = match pred {
                Predicate::PrefLabel | Predicate::AltLabel => Object::Literal {
                    text: object.to_string(),
                    lang: (!lang.is_empty()).then(|| lang.to_string()),
                },
                _ => Object::Resource(object.to_string()),
            };
            th.apply(subject, pred, object).map_err(|m| Error::parse(lineno, m))?;
        }
        Ok(th)
    }

    /// All preferred and alternative labels in `lang`, deduplicated and sorted.
    pub fn keywords(&self, lang: &str) -> Vec<Keyword> {
        let labels: BTreeSet<&str> = self
            .concepts
            .values()
            .flat_map(|c| c.pref_labels.iter().chain(&c.alt_labels))
            .filter(|l| l.lang == lang)
            .map(|l| l.text.as_str())
            .collect();
        labels.into_iter().map(Keyword::new).collect()
    }

    /// Descriptor/concept label pairs for one relation type.
    ///
    /// For concept relations the pair is (source prefLabel, target prefLabel);
    /// for altLabel each alternative label of a descriptor yields one pair.
    pub fn descriptor_pairs(&self, relation: RelationType, lang: &str, single_word_only: bool) -> PairSelection {
        let mut sel = PairSelection::default();
        let push = |sel: &mut PairSelection, descriptor: &str, concept: &str| {
            if single_word_only && (is_multi_word(descriptor) || is_multi_word(concept)) {
                sel.multi_word += 1;
                return;
            }
            sel.pairs.push(DescriptorPair {
                descriptor_label: descriptor.to_string(),
                concept_label: concept.to_string(),
                relation,
                lang: lang.to_string(),
            });
        };
        match relation {
            RelationType::AltLabel => {
                for c in self.concepts.values().filter(|c| c.is_descriptor()) {
                    let alts = c.alt_labels.iter().filter(|l| l.lang == lang);
                    match c.pref_label(lang) {
                        Some(d) => alts.for_each(|a| push(&mut sel, d, &a.text)),
                        None => sel.missing_label += alts.count(),
                    }
                }
            }
            _ => {
                for (src, dst) in self.edges.get(&relation).into_iter().flatten() {
                    let d = self.concepts.get(src).and_then(|c| c.pref_label(lang));
                    let t = self.concepts.get(dst).and_then(|c| c.pref_label(lang));
                    match (d, t) {
                        (Some(d), Some(t)) => push(&mut sel, d, t),
                        _ => sel.missing_label += 1,
                    }
                }
            }
        }
        sel
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Object {
    Resource(String),
    Literal { text: String, lang: Option<String> },
}

/// Primary subtag, lowercased; `None` unless it is two ASCII letters.
fn normalize_lang(tag: &str) -> Option<String> {
    let primary = tag.split('-').next()?.to_ascii_lowercase();
    (primary.len() == 2 && primary.bytes().all(|b| b.is_ascii_lowercase())).then_some(primary)
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start_matches([' ', '\t']).len();
    }

    fn resource(&mut self) -> std::result::Result<String, String> {
        self.skip_ws();
        let rest = self.rest();
        if let Some(body) = rest.strip_prefix('<') {
            let end = body.find('>').ok_or("unterminated IRI")?;
            self.pos += end + 2;
            Ok(body[..end].to_string())
        } else if rest.starts_with("_:") {
            let end = rest.find([' ', '\t']).unwrap_or(rest.len());
            self.pos += end;
            Ok(rest[..end].to_string())
        } else {
            Err(format!("expected IRI or blank node at {:?}", truncate(rest)))
        }
    }

    fn object(&mut self) -> std::result::Result<Object, String> {
        self.skip_ws();
        if !self.rest().starts_with('"') {
            return self.resource().map(Object::Resource);
        }
        let body = &self.rest()[1..];
        let mut text = String::new();
        let mut chars = body.char_indices();
        let end = loop {
            let Some((i, c)) = chars.next() else {
                return Err("unterminated literal".into());
            };
            match c {
                '"' => break i,
                '\\' => {
                    let (_, e) = chars.next().ok_or("dangling escape")?;
                    match e {
                        '"' => text.push('"'),
                        '\\' => text.push('\\'),
                        '\'' => text.push('\''),
                        'n' => text.push('\n'),
                        't' => text.push('\t'),
                        'r' => text.push('\r'),
                        'b' => text.push('\u{8}'),
                        'f' => text.push('\u{c}'),
                        'u' | 'U' => {
                            let width = if e == 'u' { 4 } else { 8 };
                            let hex: String = (0..width).filter_map(|_| chars.next().map(|(_, h)| h)).collect();
                            let code = u32::from_str_radix(&hex, 16)
                                .ok()
                                .filter(|_| hex.len() == width)
                                .and_then(char::from_u32)
                                .ok_or_else(|| format!("invalid \\{e} escape"))?;
                            text.push(code);
                        }
                        other => return Err(format!("unknown escape \\{other}")),
                    }
                }
                c => text.push(c),
            }
        };
        self.pos += end + 2;
        let rest = self.rest();
        let mut lang = None;
        if let Some(tag) = rest.strip_prefix('@') {
            let len = tag
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(tag.len());
            if len == 0 {
                return Err("empty language tag".into());
            }
            lang = Some(tag[..len].to_string());
            self.pos += len + 1;
        } else if let Some(dt) = rest.strip_prefix("^^") {
            let body = dt.strip_prefix('<').ok_or("expected datatype IRI")?;
            let end = body.find('>').ok_or("unterminated datatype IRI")?;
            self.pos += end + 4;
        }
        Ok(Object::Literal { text, lang })
    }
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(24) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

fn parse_triple(line: &str) -> std::result::Result<(String, String, Object), String> {
    let mut cur = Cursor { s: line, pos: 0 };
    let subject = cur.resource()?;
    cur.skip_ws();
    if !cur.rest().starts_with('<') {
        return Err("predicate must be an IRI".into());
    }
    let predicate = cur.resource()?;
    let object = cur.object()?;
    cur.skip_ws();
    let tail = cur.rest().strip_prefix('.').ok_or("missing terminating '.'")?;
    let tail = tail.trim();
    if !(tail.is_empty() || tail.starts_with('#')) {
        return Err(format!("trailing content {:?}", truncate(tail)));
    }
    Ok((subject, predicate, object))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nt(s: &str) -> Result<Thesaurus> {
        Thesaurus::parse_ntriples(s.as_bytes())
    }

    const A: &str = "<http://ex.org/A>";
    const B: &str = "<http://ex.org/B>";

    #[test]
    fn single_pref_label() {
        let th = nt(&format!("{A} <{SKOS_NS}prefLabel> \"soziale Ungleichheit\"@de .\n")).unwrap();
        assert_eq!(th.len(), 1);
        let c = th.concept("http://ex.org/A").unwrap();
        assert!(c.is_descriptor());
        assert_eq!(c.pref_label("de"), Some("soziale Ungleichheit"));
    }

    #[test]
    fn broader_implies_narrower() {
        let th = nt(&format!("{A} <{SKOS_NS}broader> {B} .\n")).unwrap();
        assert!(th.has_edge("http://ex.org/A", RelationType::Broader, "http://ex.org/B"));
        assert!(th.has_edge("http://ex.org/B", RelationType::Narrower, "http://ex.org/A"));
        let th = nt(&format!("{A} <{SKOS_NS}narrower> {B} .\n")).unwrap();
        assert!(th.has_edge("http://ex.org/B", RelationType::Broader, "http://ex.org/A"));
    }

    #[test]
    fn escapes_and_lang_normalization() {
        let th = nt(&format!(
            "{A} <{SKOS_NS}prefLabel> \"Gr\\u00FC\\\"n\\\\e\"@DE-at .\n{A} <{SKOS_NS}altLabel> \"plain\" .\n"
        ))
        .unwrap();
        let c = th.concept("http://ex.org/A").unwrap();
        assert_eq!(
            c.pref_labels,
            [Label {
                text: "Grü\"n\\e".into(),
                lang: "de".into()
            }]
        );
        assert_eq!(th.parse_report().untagged_labels, 1);
    }

    #[test]
    fn unknown_predicates_are_counted() {
        let th = nt(&format!(
            "# comment\n{A} <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{SKOS_NS}Concept> .\n{A} <{SKOS_NS}prefLabel> \"x\"@de .\n"
        ))
        .unwrap();
        assert_eq!(th.parse_report().skipped_predicates, 1);
        assert_eq!(th.parse_report().triples, 2);
    }

    #[test]
    fn malformed_lines_report_number() {
        let err = nt(&format!(
            "{A} <{SKOS_NS}prefLabel> \"x\"@de .\n{A} <{SKOS_NS}prefLabel> \"y\"@de\n"
        ))
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(matches!(nt("<a> <b>").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(nt("\n# only a comment\n").unwrap_err(), Error::EmptyInput));
    }

    #[test]
    fn tsv_errors() {
        let err =
            Thesaurus::parse_tsv("subject\tpredicate\tobject\tlang\nA\texactMatch\tB\t\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Thesaurus::parse_tsv("subject\tpredicate\tobject\tlang\nA\tbroader\tB\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let th = Thesaurus::parse_tsv("subject\tpredicate\tobject\tlang\n".as_bytes()).unwrap();
        assert!(th.is_empty());
    }

    #[test]
    fn keywords_dedup_and_sort() {
        let th = Thesaurus::parse_tsv(
            "subject\tpredicate\tobject\tlang\nA\tprefLabel\tMacht\tde\nA\taltLabel\tHerrschaft\tde\nB\tprefLabel\tMacht\tde\nB\tprefLabel\tpower\ten\n"
                .as_bytes(),
        )
        .unwrap();
        let kw: Vec<String> = th.keywords("de").into_iter().map(|k| k.label).collect();
        assert_eq!(kw, ["Herrschaft", "Macht"]);
        assert_eq!(Keyword::new("soziale Ungleichheit").tokens, ["soziale", "Ungleichheit"]);
    }

    #[test]
    fn pairs_filter_multi_word() {
        let th = Thesaurus::parse_tsv(
            "subject\tpredicate\tobject\tlang\n\
             D\tprefLabel\tUngleichheit\tde\n\
             N1\tprefLabel\tArmut\tde\n\
             N2\tprefLabel\tReichtum\tde\n\
             N3\tprefLabel\tsoziale Ungleichheit\tde\n\
             D\tnarrower\tN1\t\n\
             D\tnarrower\tN2\t\n\
             D\trelated\tN3\t\n"
                .as_bytes(),
        )
        .unwrap();
        let sel = th.descriptor_pairs(RelationType::Narrower, "de", true);
        assert_eq!(sel.pairs.len(), 2);
        let sel = th.descriptor_pairs(RelationType::Related, "de", true);
        assert!(sel.pairs.is_empty());
        assert_eq!(sel.multi_word, 1);
        assert_eq!(th.descriptor_pairs(RelationType::Related, "de", false).pairs.len(), 1);
        assert_eq!(th.descriptor_pairs(RelationType::Related, "en", false).missing_label, 1);
    }

    #[test]
    fn hyphenated_labels_are_single_words() {
        assert!(!is_multi_word("Nord-Süd-Konflikt"));
        assert!(!is_multi_word("  Macht "));
        assert!(is_multi_word("soziale Ungleichheit"));
    }
}
