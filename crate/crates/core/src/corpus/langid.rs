//! Line-level language identification.
//!
//! The default classifier is a character-trigram naive Bayes model with
//! add-one smoothing. Built-in profiles for German and English are trained
//! from reference text compiled into the crate; other languages can be added
//! from samples. Only letters take part (lowercased, words padded with a
//! space on each side), so casing, digits and punctuation do not sway the
//! decision.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const UNKNOWN: &str = "unknown";

#[derive(Debug, Clone, PartialEq)]
pub struct LangGuess {
    /// Language tag, or [`UNKNOWN`].
    pub lang: String,
    /// Posterior probability of the chosen language, in `[0, 1]`.
    pub confidence: f64,
}

impl LangGuess {
    pub fn unknown() -> Self {
        LangGuess {
            lang: UNKNOWN.to_string(),
            confidence: 0.0,
        }
    }

    pub fn is_unknown(&self) -> bool {
        self.lang == UNKNOWN
    }
}

pub trait LanguageClassifier: Send + Sync {
    fn classify(&self, line: &str) -> LangGuess;
}

type Trigram = [char; 3];

fn trigrams(line: &str) -> Vec<Trigram> {
    let mut out = Vec::new();
    let lowered = line.to_lowercase();
    for word in lowered.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty()) {
        let padded: Vec<char> = std::iter::once(' ')
            .chain(word.chars())
            .chain(std::iter::once(' '))
            .collect();
        out.extend(padded.windows(3).map(|w| [w[0], w[1], w[2]]));
    }
    out
}

#[derive(Debug, Clone)]
struct Profile {
    counts: HashMap<Trigram, u32>,
    total: u64,
}

impl Profile {
    fn train(text: &str) -> Self {
        let mut counts = HashMap::new();
        let mut total = 0;
        for line in text.lines() {
            for t in trigrams(line) {
                *counts.entry(t).or_insert(0) += 1;
                total += 1;
            }
        }
        Profile { counts, total }
    }
}

/// Character-trigram naive Bayes classifier.
#[derive(Debug, Clone)]
pub struct TrigramClassifier {
    profiles: BTreeMap<String, Profile>,
    vocab_size: usize,
    threshold: f64,
}

const BUILTIN: [(&str, &str); 2] = [
    ("de", include_str!("profiles/de.txt")),
    ("en", include_str!("profiles/en.txt")),
];

fn builtin_profiles() -> &'static BTreeMap<String, Profile> {
    static PROFILES: OnceLock<BTreeMap<String, Profile>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        BUILTIN
            .iter()
            .map(|(l, t)| (l.to_string(), Profile::train(t)))
            .collect()
    })
}

impl TrigramClassifier {
    /// Classifier over built-in profiles for `languages`.
    pub fn builtin<S: AsRef<str>>(languages: &[S], threshold: f64) -> Result<Self> {
        let all = builtin_profiles();
        let mut profiles = BTreeMap::new();
        for l in languages {
            let l = l.as_ref();
            let p = all
                .get(l)
                .ok_or_else(|| Error::Config(format!("no built-in language profile for {l:?}")))?;
            profiles.insert(l.to_string(), p.clone());
        }
        Self::from_profiles(profiles, threshold)
    }

    /// Classifier trained on `(language, sample text)` pairs.
    pub fn from_samples<S: AsRef<str>>(samples: &[(S, S)], threshold: f64) -> Result<Self> {
        let profiles = samples
            .iter()
            .map(|(l, t)| (l.as_ref().to_string(), Profile::train(t.as_ref())))
            .collect();
        Self::from_profiles(profiles, threshold)
    }

    fn from_profiles(profiles: BTreeMap<String, Profile>, threshold: f64) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::Config("at least one language is required".into()));
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::Config(format!(
                "confidence threshold {threshold} outside [0, 1]"
            )));
        }
        let vocab: HashSet<&Trigram> = profiles.values().flat_map(|p| p.counts.keys()).collect();
        Ok(TrigramClassifier {
            vocab_size: vocab.len() + 1,
            profiles,
            threshold,
        })
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.profiles.keys().map(String::as_str)
    }

    /// Log-likelihood of the line under each profile.
    fn log_likelihoods(&self, grams: &[Trigram]) -> Vec<(&str, f64)> {
        self.profiles
            .iter()
            .map(|(lang, p)| {
                let denom = (p.total + self.vocab_size as u64) as f64;
                let ll = grams
                    .iter()
                    .map(|g| ((p.counts.get(g).copied().unwrap_or(0) as f64 + 1.0) / denom).ln())
                    .sum();
                (lang.as_str(), ll)
            })
            .collect()
    }
}

impl LanguageClassifier for TrigramClassifier {
    fn classify(&self, line: &str) -> LangGuess {
        let grams = trigrams(line);
        if grams.is_empty() {
            return LangGuess::unknown();
        }
        let lls = self.log_likelihoods(&grams);
        // Ties resolve to the alphabetically first tag.
        let (best_lang, best) = lls
            .iter()
            .copied()
            .fold(("", f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let z: f64 = lls.iter().map(|(_, ll)| (ll - best).exp()).sum();
        let confidence = 1.0 / z;
        if confidence < self.threshold {
            return LangGuess {
                lang: UNKNOWN.to_string(),
                confidence,
            };
        }
        LangGuess {
            lang: best_lang.to_string(),
            confidence,
        }
    }
}
