//! Comment categories and the classifier that assigns them.
//!
//! Classification always runs on raw text, before any punctuation is
//! removed; most rules key on punctuation.

mod rules;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::langid::LangId;
pub use rules::{FilterRule, RuleKind, RuleTable, DEFAULT_RULES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Category {
    Copyright,
    CodeCallsite,
    CodeAssignment,
    HashValue,
    Latex,
    SageMath,
    Html,
    Antlr,
    NonEnglish,
    NonLinguistic,
    EncodingDirective,
    Short,
    Duplicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Copyright,
    CodeMath,
    NonEnglish,
    NonLinguistic,
    Other,
    Duplicates,
}

impl Category {
    pub const ALL: [Category; 13] = [
        Category::Copyright,
        Category::CodeCallsite,
        Category::CodeAssignment,
        Category::HashValue,
        Category::Latex,
        Category::SageMath,
        Category::Html,
        Category::Antlr,
        Category::NonEnglish,
        Category::NonLinguistic,
        Category::EncodingDirective,
        Category::Short,
        Category::Duplicate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Copyright => "Copyright",
            Category::CodeCallsite => "CodeCallsite",
            Category::CodeAssignment => "CodeAssignment",
            Category::HashValue => "HashValue",
            Category::Latex => "Latex",
            Category::SageMath => "SageMath",
            Category::Html => "Html",
            Category::Antlr => "Antlr",
            Category::NonEnglish => "NonEnglish",
            Category::NonLinguistic => "NonLinguistic",
            Category::EncodingDirective => "EncodingDirective",
            Category::Short => "Short",
            Category::Duplicate => "Duplicate",
        }
    }

    pub fn group(self) -> Group {
        match self {
            Category::Copyright => Group::Copyright,
            Category::CodeCallsite
            | Category::CodeAssignment
            | Category::HashValue
            | Category::Latex
            | Category::SageMath
            | Category::Html
            | Category::Antlr => Group::CodeMath,
            Category::NonEnglish => Group::NonEnglish,
            Category::NonLinguistic => Group::NonLinguistic,
            Category::EncodingDirective | Category::Short => Group::Other,
            Category::Duplicate => Group::Duplicates,
        }
    }

    pub fn is_code(self) -> bool {
        self.group() == Group::CodeMath
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

impl Serialize for Category {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Category {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Group {
    pub const ALL: [Group; 6] = [
        Group::CodeMath,
        Group::NonEnglish,
        Group::Copyright,
        Group::NonLinguistic,
        Group::Other,
        Group::Duplicates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Copyright => "Copyright",
            Group::CodeMath => "Code/Math",
            Group::NonEnglish => "Non-English",
            Group::NonLinguistic => "Non-Linguistic",
            Group::Other => "Other",
            Group::Duplicates => "Duplicates",
        }
    }
}

/// A set of categories; iteration follows declaration order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CategorySet(u16);

impl CategorySet {
    pub const fn empty() -> Self {
        CategorySet(0)
    }

    pub fn of(cats: &[Category]) -> Self {
        cats.iter().copied().collect()
    }

    pub fn insert(&mut self, c: Category) {
        self.0 |= 1 << c as u8;
    }

    pub fn remove(&mut self, c: Category) {
        self.0 &= !(1 << c as u8);
    }

    pub fn contains(self, c: Category) -> bool {
        self.0 & (1 << c as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersection(self, other: CategorySet) -> CategorySet {
        CategorySet(self.0 & other.0)
    }

    pub fn union(self, other: CategorySet) -> CategorySet {
        CategorySet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Category> {
        Category::ALL.into_iter().filter(move |&c| self.contains(c))
    }

    pub fn groups(self) -> impl Iterator<Item = Group> {
        Group::ALL
            .into_iter()
            .filter(move |&g| self.iter().any(|c| c.group() == g))
    }

    pub fn names(self) -> Vec<&'static str> {
        self.iter().map(Category::name).collect()
    }
}

impl FromIterator<Category> for CategorySet {
    fn from_iter<I: IntoIterator<Item = Category>>(iter: I) -> Self {
        let mut set = CategorySet::empty();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl fmt::Debug for CategorySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for CategorySet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for CategorySet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Vec::<Category>::deserialize(d)?.into_iter().collect())
    }
}

/// Default letter-fraction threshold below which text is non-linguistic.
pub const NON_LINGUISTIC_LETTER_FRACTION: f64 = 0.25;

/// Marker whose presence in a file enables the Antlr `type:` alternative.
pub const ANTLR_MARKER: &str = "$antlr";

/// Length thresholds shared by the `Short` category and the pipeline's length filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthThresholds {
    pub min_chars: usize,
    pub min_words: usize,
}

impl Default for LengthThresholds {
    fn default() -> Self {
        LengthThresholds {
            min_chars: 10,
            min_words: 4,
        }
    }
}

/// Per-file facts some rules depend on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassifyContext {
    pub file_has_antlr: bool,
}

impl ClassifyContext {
    pub fn for_file<'a>(comments: impl IntoIterator<Item = &'a str>) -> Self {
        ClassifyContext {
            file_has_antlr: comments.into_iter().any(mentions_antlr),
        }
    }
}

pub fn mentions_antlr(text: &str) -> bool {
    text.to_lowercase().contains(ANTLR_MARKER)
}

fn default_rules() -> &'static RuleTable {
    static RULES: OnceLock<RuleTable> = OnceLock::new();
    RULES.get_or_init(RuleTable::default_table)
}

/// Case-insensitive substring test for "copyright".
pub fn match_copyright(text: &str) -> bool {
    text.to_lowercase().contains("copyright")
}

/// Code and markup sub-categories found anywhere in `text` under the default rules.
pub fn match_code(text: &str) -> CategorySet {
    match_code_with(default_rules(), text, ClassifyContext::default(), false)
}

pub fn match_code_with(
    rules: &RuleTable,
    text: &str,
    ctx: ClassifyContext,
    strict_table1: bool,
) -> CategorySet {
    rules
        .code_rules()
        .filter(|r| rule_fires(r, text, ctx, strict_table1))
        .map(|r| r.category)
        .collect()
}

fn rule_fires(rule: &FilterRule, text: &str, ctx: ClassifyContext, strict_table1: bool) -> bool {
    if rule.category == Category::Antlr && !strict_table1 && !ctx.file_has_antlr {
        return rule
            .find_spans(text)
            .iter()
            .any(|&(s, e)| text[s..e].eq_ignore_ascii_case(ANTLR_MARKER));
    }
    rule.is_match(text)
}

fn html_tag() -> &'static Regex {
    static TAG: OnceLock<Regex> = OnceLock::new();
    TAG.get_or_init(|| Regex::new(r"<[^>]*>").unwrap())
}

/// Removes every `<...>` span. When a removed span sat between two whitespace
/// characters, one of them is dropped as well.
pub fn strip_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for m in html_tag().find_iter(text) {
        out.push_str(&text[last..m.start()]);
        let before_ws = out.chars().next_back().is_some_and(char::is_whitespace);
        let after_ws = text[m.end()..].chars().next().is_some_and(char::is_whitespace);
        if before_ws && after_ws {
            out.pop();
        }
        last = m.end();
    }
    out.push_str(&text[last..]);
    out
}

/// Editor encoding hints such as `-*- coding: utf-8 -*-`.
pub fn match_encoding_directive(text: &str) -> bool {
    default_rules()
        .rules()
        .iter()
        .filter(|r| r.category == Category::EncodingDirective)
        .any(|r| r.is_match(text))
}

/// Separator lines, ASCII art and other mostly-symbol text.
pub fn match_non_linguistic(text: &str) -> bool {
    match_non_linguistic_with(text, NON_LINGUISTIC_LETTER_FRACTION)
}

pub fn match_non_linguistic_with(text: &str, min_letter_fraction: f64) -> bool {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return true;
    }
    let letters = chars.iter().filter(|c| c.is_alphabetic()).count();
    if (letters as f64) / (chars.len() as f64) < min_letter_fraction {
        return true;
    }
    chars.len() >= 4 && chars.iter().all(|&c| c == chars[0])
}

/// Fewer than `min_chars` characters or fewer than `min_words` words.
pub fn is_short(text: &str, t: LengthThresholds) -> bool {
    text.trim().chars().count() < t.min_chars || text.split_whitespace().count() < t.min_words
}

/// Assigns categories using a rule table and a language identifier.
#[derive(Clone)]
pub struct Classifier {
    rules: RuleTable,
    langid: Arc<LangId>,
    strict_table1: bool,
    lengths: LengthThresholds,
    letter_fraction: f64,
}

impl Classifier {
    pub fn new(rules: RuleTable, langid: Arc<LangId>) -> Self {
        Classifier {
            rules,
            langid,
            strict_table1: false,
            lengths: LengthThresholds::default(),
            letter_fraction: NON_LINGUISTIC_LETTER_FRACTION,
        }
    }

    /// Default rules and bundled language data. Shared and built once.
    pub fn shared() -> &'static Classifier {
        static DEFAULT: OnceLock<Classifier> = OnceLock::new();
        DEFAULT.get_or_init(|| Classifier::new(default_rules().clone(), LangId::shared()))
    }

    pub fn with_strict_table1(mut self, strict: bool) -> Self {
        self.strict_table1 = strict;
        self
    }

    pub fn with_lengths(mut self, lengths: LengthThresholds) -> Self {
        self.lengths = lengths;
        self
    }

    pub fn with_letter_fraction(mut self, fraction: f64) -> Self {
        self.letter_fraction = fraction;
        self
    }

    pub fn rules(&self) -> &RuleTable {
        &self.rules
    }

    pub fn langid(&self) -> &LangId {
        &self.langid
    }

    pub fn lengths(&self) -> LengthThresholds {
        self.lengths
    }

    pub fn strict_table1(&self) -> bool {
        self.strict_table1
    }

    /// Every category whose rule matches `text`, plus `Short`. Never `Duplicate`.
    pub fn classify(&self, text: &str, ctx: ClassifyContext) -> CategorySet {
        let mut set = CategorySet::empty();
        for rule in self.rules.rules() {
            if set.contains(rule.category) {
                continue;
            }
            let hit = match rule.kind {
                RuleKind::Builtin => match rule.category {
                    Category::NonLinguistic => match_non_linguistic_with(text, self.letter_fraction),
                    Category::NonEnglish => !self.langid.is_english_with(text, &self.rules),
                    _ => false,
                },
                _ => rule_fires(rule, text, ctx, self.strict_table1),
            };
            if hit {
                set.insert(rule.category);
            }
        }
        if is_short(text, self.lengths) {
            set.insert(Category::Short);
        }
        set
    }
}

impl fmt::Debug for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Classifier")
            .field("rules", &self.rules.version())
            .field("strict_table1", &self.strict_table1)
            .finish()
    }
}

/// [`Classifier::classify`] with the shared default classifier.
pub fn classify(text: &str) -> CategorySet {
    Classifier::shared().classify(text, ClassifyContext::default())
}
