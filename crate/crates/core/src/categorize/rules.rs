//! Human-auditable rule tables.

use std::fmt;
use std::str::FromStr;

use regex::{Regex, RegexBuilder};

use super::{Category, CategorySet};
use crate::error::{Error, Result};

/// The rule table compiled into the binary.
pub const DEFAULT_RULES: &str = include_str!("../../rules/table1.rules");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    ContainsCi,
    Regex,
    RegexCi,
    RegexBounded,
    Builtin,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::ContainsCi => "contains-ci",
            RuleKind::Regex => "regex",
            RuleKind::RegexCi => "regex-ci",
            RuleKind::RegexBounded => "regex-bounded",
            RuleKind::Builtin => "builtin",
        }
    }
}

impl FromStr for RuleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "contains-ci" => RuleKind::ContainsCi,
            "regex" => RuleKind::Regex,
            "regex-ci" => RuleKind::RegexCi,
            "regex-bounded" => RuleKind::RegexBounded,
            "builtin" => RuleKind::Builtin,
            other => return Err(format!("unknown rule kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Matcher {
    Contains(String),
    Regex(Regex),
    Bounded(Regex),
    Builtin,
}

#[derive(Debug, Clone)]
pub struct FilterRule {
    pub category: Category,
    pub kind: RuleKind,
    pub pattern: String,
    pub stage: u32,
    pub(crate) matcher: Matcher,
}

impl FilterRule {
    pub fn new(category: Category, kind: RuleKind, pattern: &str, stage: u32) -> Result<Self> {
        let compile = |ci: bool| {
            RegexBuilder::new(pattern)
                .case_insensitive(ci)
                .build()
                .map_err(|source| Error::Pattern {
                    category: category.name().to_owned(),
                    source,
                })
        };
        let matcher = match kind {
            RuleKind::ContainsCi => Matcher::Contains(pattern.to_lowercase()),
            RuleKind::Regex => Matcher::Regex(compile(false)?),
            RuleKind::RegexCi => Matcher::Regex(compile(true)?),
            RuleKind::RegexBounded => Matcher::Bounded(compile(false)?),
            RuleKind::Builtin => Matcher::Builtin,
        };
        Ok(FilterRule {
            category,
            kind,
            pattern: pattern.to_owned(),
            stage,
            matcher,
        })
    }

    /// Byte spans of all accepted matches. Empty for builtin rules.
    pub fn find_spans(&self, text: &str) -> Vec<(usize, usize)> {
        match &self.matcher {
            Matcher::Contains(needle) => {
                // lowercasing can change byte offsets, so spans are only reported for ASCII
                if text.is_ascii() {
                    let lower = text.to_ascii_lowercase();
                    lower
                        .match_indices(needle.as_str())
                        .map(|(i, m)| (i, i + m.len()))
                        .collect()
                } else {
                    Vec::new()
                }
            }
            Matcher::Regex(re) => re.find_iter(text).map(|m| (m.start(), m.end())).collect(),
            Matcher::Bounded(re) => re
                .find_iter(text)
                .filter(|m| word_bounded(text, m.start(), m.end()))
                .map(|m| (m.start(), m.end()))
                .collect(),
            Matcher::Builtin => Vec::new(),
        }
    }

    /// Whether the rule fires anywhere in `text`. Builtin rules never fire here.
    pub fn is_match(&self, text: &str) -> bool {
        match &self.matcher {
            Matcher::Contains(needle) => text.to_lowercase().contains(needle.as_str()),
            Matcher::Regex(re) => re.is_match(text),
            Matcher::Bounded(re) => re
                .find_iter(text)
                .any(|m| word_bounded(text, m.start(), m.end())),
            Matcher::Builtin => false,
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn word_bounded(text: &str, start: usize, end: usize) -> bool {
    let before = text[..start].chars().next_back();
    let after = text[end..].chars().next();
    !before.is_some_and(is_word_char) && !after.is_some_and(is_word_char)
}

/// An ordered list of filter rules.
#[derive(Debug, Clone)]
pub struct RuleTable {
    version: String,
    rules: Vec<FilterRule>,
}

impl RuleTable {
    pub fn new(version: impl Into<String>, mut rules: Vec<FilterRule>) -> Self {
        rules.sort_by_key(|r| r.stage);
        RuleTable {
            version: version.into(),
            rules,
        }
    }

    pub fn default_table() -> Self {
        Self::parse(DEFAULT_RULES).expect("embedded rule table is valid")
    }

    /// Parses the `stage category kind pattern` line format.
    pub fn parse(src: &str) -> Result<Self> {
        let mut version = String::from("custom");
        let mut rules = Vec::new();
        for (idx, line) in src.lines().enumerate() {
            let lineno = idx + 1;
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(v) = trimmed.strip_prefix("version ") {
                version = v.trim().to_owned();
                continue;
            }
            let bad = |reason: String| Error::Rule {
                line: lineno,
                reason,
            };
            let (stage, rest) = split_field(trimmed).ok_or_else(|| bad("missing category".into()))?;
            let (category, rest) = split_field(rest).ok_or_else(|| bad("missing kind".into()))?;
            let (kind, pattern) = split_field(rest).ok_or_else(|| bad("missing pattern".into()))?;
            let pattern = pattern.trim_end();
            let stage: u32 = stage
                .parse()
                .map_err(|_| bad(format!("stage `{stage}` is not an integer")))?;
            let category: Category = category.parse().map_err(bad)?;
            let kind: RuleKind = kind.parse().map_err(bad)?;
            if matches!(category, Category::Short | Category::Duplicate) {
                return Err(bad(format!(
                    "{} is assigned by the pipeline, not by rules",
                    category.name()
                )));
            }
            if kind == RuleKind::Builtin
                && !matches!(category, Category::NonLinguistic | Category::NonEnglish)
            {
                return Err(bad(format!("no builtin matcher for {}", category.name())));
            }
            rules.push(FilterRule::new(category, kind, pattern, stage).map_err(|e| match e {
                Error::Pattern { source, .. } => bad(source.to_string()),
                other => other,
            })?);
        }
        Ok(RuleTable::new(version, rules))
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn rules(&self) -> &[FilterRule] {
        &self.rules
    }

    /// Lowest stage of any rule for `category`. Categories without rules sort last,
    /// with `Short` (the length stage) before `Duplicate`.
    pub fn stage_of(&self, category: Category) -> u32 {
        self.rules
            .iter()
            .filter(|r| r.category == category)
            .map(|r| r.stage)
            .min()
            .unwrap_or(match category {
                Category::Duplicate => u32::MAX,
                _ => u32::MAX - 1,
            })
    }

    /// The member of `set` that comes first in stage order.
    pub fn first_by_stage(&self, set: CategorySet) -> Option<Category> {
        set.iter().min_by_key(|&c| (self.stage_of(c), c as u8))
    }

    /// Rules whose matches are code or markup spans.
    pub fn code_rules(&self) -> impl Iterator<Item = &FilterRule> {
        self.rules
            .iter()
            .filter(|r| r.category.is_code() && r.kind != RuleKind::Builtin)
    }
}

impl fmt::Display for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "version {}", self.version)?;
        for r in &self.rules {
            writeln!(
                f,
                "{} {} {} {}",
                r.stage,
                r.category.name(),
                r.kind.as_str(),
                r.pattern
            )?;
        }
        Ok(())
    }
}

fn split_field(s: &str) -> Option<(&str, &str)> {
    let s = s.trim_start();
    let end = s.find(char::is_whitespace)?;
    Some((&s[..end], s[end..].trim_start()))
}
