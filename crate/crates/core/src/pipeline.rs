//! Basic and advanced filtering, normalization and deduplication.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::categorize::{
    match_copyright, strip_html, Category, CategorySet, ClassifyContext, Classifier,
    LengthThresholds,
};
use crate::extract::CommentUnit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    Basic,
    Advanced,
}

impl FilterMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterMode::Basic => "basic",
            FilterMode::Advanced => "advanced",
        }
    }

    /// Categories that drop a comment in this mode. Html is stripped, not dropped.
    pub fn droppable(self) -> CategorySet {
        match self {
            FilterMode::Basic => CategorySet::of(&[Category::Copyright]),
            FilterMode::Advanced => CategorySet::of(&[
                Category::Copyright,
                Category::CodeCallsite,
                Category::CodeAssignment,
                Category::HashValue,
                Category::Latex,
                Category::SageMath,
                Category::Antlr,
                Category::NonEnglish,
                Category::NonLinguistic,
                Category::EncodingDirective,
            ]),
        }
    }
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "basic" => Ok(FilterMode::Basic),
            "advanced" => Ok(FilterMode::Advanced),
            other => Err(format!("unknown filter mode `{other}` (expected basic or advanced)")),
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-comment processing steps, run in order. Deduplication always runs last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Lowercase,
    /// Classify the current text and drop on any droppable category.
    Categories,
    /// URL, HTML and symbol removal.
    Normalize,
    Length,
}

impl Stage {
    /// Lowercase, categories, then punctuation removal and the length filter.
    pub const STANDARD: [Stage; 4] = [
        Stage::Lowercase,
        Stage::Categories,
        Stage::Normalize,
        Stage::Length,
    ];

    /// Punctuation removal and the length filter before classification.
    pub const PUNCTUATION_FIRST: [Stage; 4] = [
        Stage::Lowercase,
        Stage::Normalize,
        Stage::Length,
        Stage::Categories,
    ];
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub mode: FilterMode,
    pub stages: Vec<Stage>,
    pub lengths: LengthThresholds,
    pub classifier: Arc<Classifier>,
}

impl PipelineConfig {
    pub fn new(mode: FilterMode) -> Self {
        PipelineConfig::with_classifier(mode, Arc::new(Classifier::shared().clone()))
    }

    pub fn with_classifier(mode: FilterMode, classifier: Arc<Classifier>) -> Self {
        PipelineConfig {
            mode,
            stages: Stage::STANDARD.to_vec(),
            lengths: classifier.lengths(),
            classifier,
        }
    }

    pub fn basic() -> Self {
        PipelineConfig::new(FilterMode::Basic)
    }

    pub fn advanced() -> Self {
        PipelineConfig::new(FilterMode::Advanced)
    }

    /// Replaces the stage order. Used to demonstrate what goes wrong when
    /// punctuation is removed before classification.
    pub fn with_stages(mut self, stages: &[Stage]) -> Self {
        self.stages = stages.to_vec();
        self
    }

    /// Whether every category check happens before punctuation removal.
    pub fn classifies_before_normalizing(&self) -> bool {
        let pos = |s| self.stages.iter().position(|&x| x == s);
        match (pos(Stage::Categories), pos(Stage::Normalize)) {
            (Some(c), Some(n)) => c < n,
            (None, _) => true,
            (Some(_), None) => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Kept,
    Dropped,
}

/// Why a record was dropped: a category or the length stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    Category(Category),
    Length,
}

impl DropReason {
    pub fn name(self) -> &'static str {
        match self {
            DropReason::Category(c) => c.name(),
            DropReason::Length => "length",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DropReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "length" {
            return Ok(DropReason::Length);
        }
        s.parse().map(DropReason::Category)
    }
}

impl Serialize for DropReason {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for DropReason {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The filtering outcome for one comment unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: u64,
    pub status: RecordStatus,
    pub categories: CategorySet,
    pub drop_reason: Option<DropReason>,
    pub duplicate_of: Option<u64>,
    /// Normalized tokens joined by single spaces, when normalization ran.
    pub normalized: Option<String>,
}

impl CorpusRecord {
    pub fn is_kept(&self) -> bool {
        self.status == RecordStatus::Kept
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.normalized
            .as_deref()
            .map(|n| n.split(' ').filter(|t| !t.is_empty()).collect())
            .unwrap_or_default()
    }
}

fn url_span() -> &'static Regex {
    static URL: OnceLock<Regex> = OnceLock::new();
    URL.get_or_init(|| Regex::new(r"(?i)\S*(?:[a-z][a-z0-9+.\-]*://|\bwww\.)\S*").unwrap())
}

/// Removes URL spans: maximal non-space runs containing `scheme://` or `www.`.
pub fn remove_urls(text: &str) -> String {
    url_span().replace_all(text, " ").into_owned()
}

/// Lowercase, drop URLs and HTML tags, turn every other symbol into a space, split.
pub fn normalize_basic(text: &str) -> Vec<String> {
    normalize_joined(text)
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// [`normalize_basic`] joined by single spaces.
pub fn normalize_joined(text: &str) -> String {
    let lowered = text.to_lowercase();
    let stripped = strip_html(&remove_urls(&lowered));
    let mut out = String::with_capacity(stripped.len());
    let mut pending_space = false;
    for c in stripped.chars() {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

fn fails_length(joined: &str, t: LengthThresholds) -> bool {
    joined.chars().count() < t.min_chars || joined.split(' ').filter(|s| !s.is_empty()).count() < t.min_words
}

/// Dedup key: 128 bits from two independent hashes of the normalized text.
pub fn dedup_key(text: &str) -> u128 {
    let mut a = DefaultHasher::new();
    text.hash(&mut a);
    let mut b = DefaultHasher::new();
    0x9e37_79b9_7f4a_7c15_u64.hash(&mut b);
    text.hash(&mut b);
    ((a.finish() as u128) << 64) | b.finish() as u128
}

/// Streaming pipeline. Feed units in corpus order with [`Pipeline::process`];
/// every call must contain all units of each file it touches.
#[derive(Debug)]
pub struct Pipeline {
    config: PipelineConfig,
    seen: HashMap<u128, u64>,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Self {
        Pipeline {
            config,
            seen: HashMap::new(),
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Number of distinct kept texts so far.
    pub fn distinct_kept(&self) -> usize {
        self.seen.len()
    }

    pub fn process(&mut self, units: &[CommentUnit]) -> Vec<CorpusRecord> {
        let contexts = file_contexts(units);
        let mut records: Vec<CorpusRecord> = units
            .par_iter()
            .map(|u| self.process_unit(u, contexts[u.file.as_str()]))
            .collect();
        for r in &mut records {
            mark_duplicate(&mut self.seen, r);
        }
        records
    }

    fn process_unit(&self, unit: &CommentUnit, ctx: ClassifyContext) -> CorpusRecord {
        let cfg = &self.config;
        let mut text = std::borrow::Cow::Borrowed(unit.raw_text.as_str());
        let mut normalized: Option<String> = None;
        let mut categories = CategorySet::empty();
        let mut drop: Option<DropReason> = None;
        for &stage in &cfg.stages {
            match stage {
                Stage::Lowercase => text = std::borrow::Cow::Owned(text.to_lowercase()),
                Stage::Categories => {
                    let current = normalized.as_deref().unwrap_or(&text);
                    categories = cfg.classifier.classify(current, ctx);
                    let hit = categories.intersection(cfg.mode.droppable());
                    if drop.is_none() && !hit.is_empty() {
                        drop = cfg.classifier.rules().first_by_stage(hit).map(DropReason::Category);
                    }
                    // basic filtering drops copyright notices even when the rule table lacks them
                    if drop.is_none() && cfg.mode == FilterMode::Basic && match_copyright(current) {
                        categories.insert(Category::Copyright);
                        drop = Some(DropReason::Category(Category::Copyright));
                    }
                }
                Stage::Normalize => {
                    normalized = Some(normalize_joined(normalized.as_deref().unwrap_or(&text)));
                }
                Stage::Length => {
                    let current = normalized.as_deref().unwrap_or(&text);
                    if drop.is_none() && fails_length(current, cfg.lengths) {
                        drop = Some(DropReason::Length);
                    }
                }
            }
            if drop.is_some() && !matches!(drop, Some(DropReason::Length)) {
                break;
            }
        }
        if drop.is_none() && normalized.is_none() {
            normalized = Some(normalize_joined(&text));
            if fails_length(normalized.as_deref().unwrap(), cfg.lengths) {
                drop = Some(DropReason::Length);
            }
        }
        CorpusRecord {
            id: unit.id,
            status: if drop.is_some() {
                RecordStatus::Dropped
            } else {
                RecordStatus::Kept
            },
            categories,
            drop_reason: drop,
            duplicate_of: None,
            normalized,
        }
    }
}

fn file_contexts(units: &[CommentUnit]) -> HashMap<&str, ClassifyContext> {
    let mut contexts: HashMap<&str, ClassifyContext> = HashMap::new();
    for u in units {
        let ctx = contexts.entry(u.file.as_str()).or_default();
        if !ctx.file_has_antlr && crate::categorize::mentions_antlr(&u.raw_text) {
            ctx.file_has_antlr = true;
        }
    }
    contexts
}

fn mark_duplicate(seen: &mut HashMap<u128, u64>, r: &mut CorpusRecord) {
    if r.status != RecordStatus::Kept {
        return;
    }
    let Some(text) = r.normalized.as_deref() else {
        return;
    };
    let key = dedup_key(text);
    match seen.get(&key) {
        Some(&first) if first != r.id => {
            r.status = RecordStatus::Dropped;
            r.drop_reason = Some(DropReason::Category(Category::Duplicate));
            r.duplicate_of = Some(first);
            r.categories.insert(Category::Duplicate);
        }
        Some(_) => {}
        None => {
            seen.insert(key, r.id);
        }
    }
}

/// Runs the whole pipeline over a corpus held in memory.
pub fn run(units: &[CommentUnit], config: &PipelineConfig) -> Vec<CorpusRecord> {
    Pipeline::new(config.clone()).process(units)
}

pub fn run_basic(units: &[CommentUnit]) -> Vec<CorpusRecord> {
    run(units, &PipelineConfig::basic())
}

pub fn run_advanced(units: &[CommentUnit]) -> Vec<CorpusRecord> {
    run(units, &PipelineConfig::advanced())
}

/// Marks later kept records whose normalized text repeats an earlier kept one.
pub fn dedup(mut records: Vec<CorpusRecord>) -> Vec<CorpusRecord> {
    let mut seen = HashMap::new();
    for r in &mut records {
        mark_duplicate(&mut seen, r);
    }
    records
}

/// Splits raw comment text into sentences on `.`, `!` or `?` followed by
/// whitespace (or the end), and on blank lines. Each fragment is normalized;
/// fragments shorter than `min_words` tokens are discarded.
pub fn split_sentences(text: &str, min_words: usize) -> Vec<Vec<String>> {
    let cleaned = strip_html(&remove_urls(text));
    let mut out = Vec::new();
    let mut push = |frag: &str| {
        let toks = normalize_basic(frag);
        if !toks.is_empty() && toks.len() >= min_words {
            out.push(toks);
        }
    };
    for para in split_blank_lines(&cleaned) {
        let chars: Vec<(usize, char)> = para.char_indices().collect();
        let mut start = 0;
        for (i, &(pos, c)) in chars.iter().enumerate() {
            if matches!(c, '.' | '!' | '?') {
                let next = chars.get(i + 1).map(|&(_, n)| n);
                if next.is_none_or(char::is_whitespace) {
                    push(&para[start..pos]);
                    start = pos + c.len_utf8();
                }
            }
        }
        push(&para[start..]);
    }
    out
}

fn split_blank_lines(text: &str) -> Vec<&str> {
    let mut paras = Vec::new();
    let mut start = 0;
    let mut offset = 0;
    let mut prev_blank = false;
    for line in text.split_inclusive('\n') {
        let blank = line.trim().is_empty();
        if blank && !prev_blank {
            paras.push(&text[start..offset]);
        }
        if !blank && prev_blank {
            start = offset;
        }
        prev_blank = blank;
        offset += line.len();
    }
    if !prev_blank {
        paras.push(&text[start..]);
    }
    paras
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::CommentKind;

    fn unit(id: u64, text: &str) -> CommentUnit {
        CommentUnit {
            id,
            file: "f.py".into(),
            start_line: id as usize + 1,
            end_line: id as usize + 1,
            column: 0,
            kind: CommentKind::LineBlock,
            raw_text: text.into(),
        }
    }

    fn units(texts: &[&str]) -> Vec<CommentUnit> {
        texts.iter().enumerate().map(|(i, t)| unit(i as u64, t)).collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_basic("Return the First VALUE."), ["return", "the", "first", "value"]);
        assert_eq!(normalize_basic("see https://example.com/x for details"), ["see", "for", "details"]);
        assert_eq!(normalize_basic("x = 5"), ["x", "5"]);
        assert_eq!(normalize_basic("visit www.example.org today"), ["visit", "today"]);
        assert_eq!(normalize_basic("a <b>bold</b> word ¶ ▒"), ["a", "bold", "word"]);
        assert!(normalize_basic("").is_empty());
    }

    #[test]
    fn basic_examples() {
        let r = run_basic(&units(&[
            "Copyright 2020 Foo Corp, all rights reserved",
            "-*- coding: utf-8 -*-",
            "compute the row count",
            "compute the row count",
        ]));
        assert_eq!(r[0].drop_reason, Some(DropReason::Category(Category::Copyright)));
        assert_eq!(r[1].drop_reason, Some(DropReason::Length));
        assert_eq!(r[1].normalized.as_deref(), Some("coding utf 8"));
        assert!(r[2].is_kept());
        assert_eq!(r[3].drop_reason, Some(DropReason::Category(Category::Duplicate)));
        assert_eq!(r[3].duplicate_of, Some(2));
    }

    #[test]
    fn advanced_examples() {
        let r = run_advanced(&units(&[
            "-*- coding: utf-8 -*-",
            "call self.init(cfg) after construction",
            "<p>returns the current user object instance</p>",
        ]));
        assert_eq!(r[0].drop_reason, Some(DropReason::Category(Category::EncodingDirective)));
        assert_eq!(r[1].drop_reason, Some(DropReason::Category(Category::CodeCallsite)));
        assert!(r[2].is_kept(), "{:?}", r[2]);
        assert_eq!(r[2].normalized.as_deref(), Some("returns the current user object instance"));
        assert!(r[2].categories.contains(Category::Html));
    }

    #[test]
    fn punctuation_first_loses_the_directive() {
        let cfg = PipelineConfig::advanced().with_stages(&Stage::PUNCTUATION_FIRST);
        assert!(!cfg.classifies_before_normalizing());
        let r = run(&units(&["-*- coding: utf-8 -*-"]), &cfg);
        assert_eq!(r[0].drop_reason, Some(DropReason::Length));
        assert!(!r[0].categories.contains(Category::EncodingDirective));
        assert!(PipelineConfig::advanced().classifies_before_normalizing());
    }

    #[test]
    fn dedup_examples() {
        let recs = run_basic(&units(&[
            "returns the first value",
            "returns the first value",
            "opens the output file",
        ]));
        let kept: Vec<u64> = recs.iter().filter(|r| r.is_kept()).map(|r| r.id).collect();
        assert_eq!(kept, [0, 2]);
        assert_eq!(dedup(recs.clone()), recs);
        let distinct = run_basic(&units(&["returns the first value", "opens the output file"]));
        assert_eq!(dedup(distinct.clone()), distinct);
    }

    #[test]
    fn sentence_examples() {
        assert!(split_sentences("Opens the file. Returns a handle.", 4).is_empty());
        assert_eq!(
            split_sentences("Opens the file. Returns a handle.", 1),
            vec![vec!["opens", "the", "file"], vec!["returns", "a", "handle"]]
        );
        assert_eq!(split_sentences("reads the whole buffer into memory", 4)[0].len(), 6);
        assert_eq!(
            split_sentences("line one\n\nline two of this block", 4),
            vec![vec!["line", "two", "of", "this", "block"]]
        );
        assert_eq!(
            split_sentences("see docs.python.org for the full list", 4).len(),
            1
        );
    }

    #[test]
    fn record_json_shape() {
        let r = &run_basic(&units(&["returns the first value"]))[0];
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        assert_eq!(v["status"], "kept");
        assert_eq!(v["drop_reason"], serde_json::Value::Null);
        assert_eq!(v["normalized"], "returns the first value");
        let back: CorpusRecord = serde_json::from_value(v).unwrap();
        assert_eq!(&back, r);
    }

    proptest::proptest! {
        #[test]
        fn kept_texts_are_distinct_and_valid(texts in proptest::collection::vec("[a-c ]{0,12}", 0..40)) {
            let us: Vec<CommentUnit> = texts.iter().enumerate().map(|(i, t)| unit(i as u64, t)).collect();
            let recs = run_basic(&us);
            let mut seen = std::collections::HashSet::new();
            for r in recs.iter().filter(|r| r.is_kept()) {
                let n = r.normalized.clone().unwrap();
                proptest::prop_assert!(r.tokens().len() >= 4 && n.chars().count() >= 10);
                proptest::prop_assert!(seen.insert(n));
            }
            for r in recs.iter().filter(|r| r.duplicate_of.is_some()) {
                let first = &recs[r.duplicate_of.unwrap() as usize];
                proptest::prop_assert!(first.is_kept());
                proptest::prop_assert_eq!(&first.normalized, &r.normalized);
            }
            proptest::prop_assert_eq!(dedup(recs.clone()), recs);
        }

        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,40}") {
            let once = normalize_joined(&s);
            proptest::prop_assert_eq!(normalize_joined(&once), once);
        }
    }
}
