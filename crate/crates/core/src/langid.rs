//! English detection over 4-word windows.
//!
//! Each window is assigned a language from the scripts of its characters, or
//! else by cosine similarity between its character-trigram counts and bundled
//! per-language trigram profiles. When the two best profiles are too close to
//! call, English is decided by coverage against an English word list.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::categorize::RuleTable;
use crate::error::{Error, Result};

pub const DEFAULT_PROFILES: &str = include_str!("../data/profiles.json");
pub const DEFAULT_LEXICON: &str = include_str!("../data/lexicon_en.txt");

pub const WINDOW: usize = 4;
pub const UNDETERMINED: &str = "und";
pub const ENGLISH: &str = "en";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangIdConfig {
    /// Minimum gap between the two best profile similarities.
    pub margin: f64,
    /// Lexicon hits (out of 4) needed to call an ambiguous window English.
    pub window_coverage: usize,
    /// Lexicon hit fraction needed for texts shorter than one window.
    pub short_coverage: f64,
}

impl Default for LangIdConfig {
    fn default() -> Self {
        LangIdConfig {
            margin: 0.05,
            window_coverage: 2,
            short_coverage: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangProfile {
    pub language: String,
    pub trigram_freqs: HashMap<String, f64>,
}

impl LangProfile {
    /// Normalizes frequencies to sum to 1. Rejects negative or empty profiles.
    pub fn new(language: impl Into<String>, freqs: HashMap<String, f64>) -> Result<Self> {
        let language = language.into();
        if freqs.values().any(|&f| !(f >= 0.0) || !f.is_finite()) {
            return Err(Error::LangData(format!("{language}: negative or non-finite frequency")));
        }
        let total: f64 = freqs.values().sum();
        if total <= 0.0 {
            return Err(Error::LangData(format!("{language}: empty profile")));
        }
        let trigram_freqs = freqs.into_iter().map(|(k, v)| (k, v / total)).collect();
        Ok(LangProfile {
            language,
            trigram_freqs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnglishLexicon {
    words: HashSet<String>,
}

impl EnglishLexicon {
    pub fn parse(src: &str) -> Result<Self> {
        let words: HashSet<String> = src
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty() && !w.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        if words.is_empty() {
            return Err(Error::LangData("lexicon is empty".into()));
        }
        Ok(EnglishLexicon { words })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Lowercased lookup; `it's` counts if `it` is known.
    pub fn contains(&self, word: &str) -> bool {
        let lower = word.to_lowercase();
        if self.words.contains(&lower) {
            return true;
        }
        match lower.split_once(['\'', '\u{2019}']) {
            Some((head, _)) if !head.is_empty() => self.words.contains(head),
            _ => false,
        }
    }
}

/// Parses the profile JSON format: `{lang: {trigram: frequency}}`.
pub fn parse_profiles(src: &str) -> Result<Vec<LangProfile>> {
    let raw: std::collections::BTreeMap<String, HashMap<String, f64>> =
        serde_json::from_str(src).map_err(|e| Error::LangData(e.to_string()))?;
    raw.into_iter()
        .map(|(lang, freqs)| LangProfile::new(lang, freqs))
        .collect()
}

type TrigramKey = u64;

fn trigram_key(a: char, b: char, c: char) -> TrigramKey {
    ((a as u64) << 42) | ((b as u64) << 21) | c as u64
}

fn window_trigrams(words: &[&str]) -> Vec<(TrigramKey, u32)> {
    let mut keys = Vec::new();
    for w in words {
        let padded: Vec<char> = std::iter::once(' ')
            .chain(w.chars().flat_map(char::to_lowercase))
            .chain(std::iter::once(' '))
            .collect();
        keys.extend(padded.windows(3).map(|t| trigram_key(t[0], t[1], t[2])));
    }
    keys.sort_unstable();
    let mut counted: Vec<(TrigramKey, u32)> = Vec::with_capacity(keys.len());
    for k in keys {
        match counted.last_mut() {
            Some((last, n)) if *last == k => *n += 1,
            _ => counted.push((k, 1)),
        }
    }
    counted
}

/// Language bucket for letters outside the Latin script, if any.
fn script_bucket(c: char) -> Option<&'static str> {
    if !c.is_alphabetic() {
        return None;
    }
    let cp = c as u32;
    let bucket = match cp {
        0..=0x02FF | 0x1E00..=0x1EFF | 0x2C60..=0x2C7F | 0xA720..=0xA7FF | 0xAB30..=0xAB6F
        | 0xFB00..=0xFB06 | 0xFF21..=0xFF3A | 0xFF41..=0xFF5A => return None,
        0x3040..=0x30FF | 0x31F0..=0x31FF | 0xFF66..=0xFF9F => "ja",
        0x3400..=0x4DBF | 0x4E00..=0x9FFF | 0xF900..=0xFAFF | 0x20000..=0x2FA1F => "zh",
        0x1100..=0x11FF | 0x3130..=0x318F | 0xAC00..=0xD7AF => "ko",
        0x0400..=0x052F | 0x1C80..=0x1C8F | 0x2DE0..=0x2DFF | 0xA640..=0xA69F => "ru",
        0x0370..=0x03FF | 0x1F00..=0x1FFF => "el",
        0x0590..=0x05FF => "he",
        0x0600..=0x06FF | 0x0750..=0x077F | 0x08A0..=0x08FF => "ar",
        0x0900..=0x097F => "hi",
        0x0E00..=0x0E7F => "th",
        _ => UNDETERMINED,
    };
    Some(bucket)
}

/// The dominant non-Latin bucket among `words`, if any letter is non-Latin.
/// Kana anywhere makes the text Japanese even when Han characters dominate.
fn non_latin_bucket(words: &[&str]) -> Option<&'static str> {
    let mut counts: Vec<(&'static str, usize)> = Vec::new();
    for c in words.iter().flat_map(|w| w.chars()) {
        if let Some(b) = script_bucket(c) {
            match counts.iter_mut().find(|(k, _)| *k == b) {
                Some((_, n)) => *n += 1,
                None => counts.push((b, 1)),
            }
        }
    }
    if counts.iter().any(|(k, _)| *k == "ja") {
        return Some("ja");
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)))
        .map(|(k, _)| k)
}

/// Window and text level language decisions.
pub struct LangId {
    languages: Vec<String>,
    /// trigram -> frequency in each profile, indexed like `languages`
    table: HashMap<TrigramKey, Box<[f64]>>,
    norms: Vec<f64>,
    lexicon: EnglishLexicon,
    config: LangIdConfig,
    rules: RuleTable,
}

impl LangId {
    pub fn new(profiles: Vec<LangProfile>, lexicon: EnglishLexicon, config: LangIdConfig) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::LangData("no language profiles".into()));
        }
        let languages: Vec<String> = profiles.iter().map(|p| p.language.clone()).collect();
        let mut table: HashMap<TrigramKey, Box<[f64]>> = HashMap::new();
        let mut norms = vec![0.0; profiles.len()];
        for (i, p) in profiles.iter().enumerate() {
            for (tri, &f) in &p.trigram_freqs {
                let chars: Vec<char> = tri.chars().collect();
                let [a, b, c] = chars[..] else {
                    return Err(Error::LangData(format!(
                        "{}: `{tri}` is not a trigram",
                        p.language
                    )));
                };
                table
                    .entry(trigram_key(a, b, c))
                    .or_insert_with(|| vec![0.0; profiles.len()].into_boxed_slice())[i] = f;
                norms[i] += f * f;
            }
        }
        for n in &mut norms {
            *n = n.sqrt();
        }
        Ok(LangId {
            languages,
            table,
            norms,
            lexicon,
            config,
            rules: RuleTable::default_table(),
        })
    }

    /// Bundled profiles and lexicon with default thresholds.
    pub fn bundled(config: LangIdConfig) -> Self {
        let profiles = parse_profiles(DEFAULT_PROFILES).expect("bundled profiles are valid");
        let lexicon = EnglishLexicon::parse(DEFAULT_LEXICON).expect("bundled lexicon is valid");
        LangId::new(profiles, lexicon, config).expect("bundled language data is valid")
    }

    pub fn shared() -> Arc<LangId> {
        static SHARED: OnceLock<Arc<LangId>> = OnceLock::new();
        SHARED
            .get_or_init(|| Arc::new(LangId::bundled(LangIdConfig::default())))
            .clone()
    }

    /// Loads data files; either path may be omitted to use the bundled copy.
    pub fn load(profiles: Option<&Path>, lexicon: Option<&Path>, config: LangIdConfig) -> Result<Self> {
        let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let profiles = match profiles {
            Some(p) => parse_profiles(&read(p)?)?,
            None => parse_profiles(DEFAULT_PROFILES)?,
        };
        let lexicon = match lexicon {
            Some(p) => EnglishLexicon::parse(&read(p)?)?,
            None => EnglishLexicon::parse(DEFAULT_LEXICON)?,
        };
        LangId::new(profiles, lexicon, config)
    }

    pub fn config(&self) -> LangIdConfig {
        self.config
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn lexicon(&self) -> &EnglishLexicon {
        &self.lexicon
    }

    /// Cosine similarity of `words` against every profile, in profile order.
    pub fn similarities(&self, words: &[&str]) -> Vec<f64> {
        let counts = window_trigrams(words);
        let norm_w = counts
            .iter()
            .map(|&(_, n)| (n as f64) * (n as f64))
            .sum::<f64>()
            .sqrt();
        let mut dots = vec![0.0; self.languages.len()];
        for (key, n) in counts {
            if let Some(freqs) = self.table.get(&key) {
                for (d, f) in dots.iter_mut().zip(freqs.iter()) {
                    *d += n as f64 * f;
                }
            }
        }
        dots.iter()
            .zip(&self.norms)
            .map(|(d, n)| if norm_w > 0.0 && *n > 0.0 { d / (norm_w * n) } else { 0.0 })
            .collect()
    }

    /// Language of exactly four tokens, or `"und"`.
    ///
    /// Panics if `words.len() != 4`.
    pub fn classify_window(&self, words: &[&str]) -> &str {
        assert_eq!(words.len(), WINDOW, "classify_window needs exactly 4 tokens");
        if let Some(bucket) = non_latin_bucket(words) {
            return bucket;
        }
        let sims = self.similarities(words);
        let mut order: Vec<usize> = (0..sims.len()).collect();
        order.sort_by(|&a, &b| sims[b].total_cmp(&sims[a]).then(a.cmp(&b)));
        let best = order[0];
        let runner_up = order.get(1).map_or(0.0, |&i| sims[i]);
        if sims[best] - runner_up < self.config.margin {
            let hits = words.iter().filter(|w| self.lexicon.contains(w)).count();
            return if hits >= self.config.window_coverage {
                ENGLISH
            } else {
                UNDETERMINED
            };
        }
        &self.languages[best]
    }

    /// Tokens used for language decisions: code spans from the default rules
    /// removed, edge punctuation trimmed, letterless tokens dropped.
    pub fn tokens(&self, text: &str) -> Vec<String> {
        tokens_without(text, &self.rules)
    }

    pub fn is_english(&self, text: &str) -> bool {
        self.decide(&self.tokens(text))
    }

    /// Like [`is_english`](Self::is_english) but strips the code spans of `rules`.
    pub fn is_english_with(&self, text: &str, rules: &RuleTable) -> bool {
        self.decide(&tokens_without(text, rules))
    }

    fn decide(&self, tokens: &[String]) -> bool {
        let words: Vec<&str> = tokens.iter().map(String::as_str).collect();
        if words.len() < WINDOW {
            if words.is_empty() {
                return true;
            }
            if non_latin_bucket(&words).is_some() {
                return false;
            }
            let hits = words.iter().filter(|w| self.lexicon.contains(w)).count();
            return hits as f64 >= self.config.short_coverage * words.len() as f64;
        }
        words
            .windows(WINDOW)
            .all(|w| self.classify_window(w) == ENGLISH)
    }
}

impl std::fmt::Debug for LangId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LangId")
            .field("languages", &self.languages)
            .field("lexicon_words", &self.lexicon.len())
            .field("config", &self.config)
            .finish()
    }
}

fn tokens_without(text: &str, rules: &RuleTable) -> Vec<String> {
    let mut cleaned = std::borrow::Cow::Borrowed(text);
    for rule in rules.code_rules() {
        let spans = rule.find_spans(&cleaned);
        if spans.is_empty() {
            continue;
        }
        let mut out = String::with_capacity(cleaned.len());
        let mut last = 0;
        for (start, end) in spans {
            out.push_str(&cleaned[last..start]);
            out.push(' ');
            last = end;
        }
        out.push_str(&cleaned[last..]);
        cleaned = std::borrow::Cow::Owned(out);
    }
    cleaned
        .split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| t.chars().any(char::is_alphabetic))
        .map(str::to_owned)
        .collect()
}
