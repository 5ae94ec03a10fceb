//! Flat `key = value` configuration files.
//!
//! ```text
//! # comments start with '#'
//! rules = my.rules
//! strict_table1 = false
//! langid.margin = 0.05
//! langid.window_coverage = 2
//! langid.short_coverage = 0.5
//! langid.profiles = profiles.json
//! langid.lexicon = words.txt
//! length.min_chars = 10
//! length.min_words = 4
//! non_linguistic.letter_fraction = 0.25
//! seed = 42
//! jobs = 4
//! holdout = 10000
//! threshold = 0.9
//! max_len = 40
//! vocab_size = 10000
//! ```
//!
//! Relative paths are resolved against the directory of the config file.
//! Every key is optional; command-line flags take precedence.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::categorize::{Classifier, LengthThresholds, RuleTable};
use crate::error::{Error, Result};
use crate::langid::{LangId, LangIdConfig};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Config {
    pub rules: Option<PathBuf>,
    pub strict_table1: Option<bool>,
    pub langid_margin: Option<f64>,
    pub langid_window_coverage: Option<usize>,
    pub langid_short_coverage: Option<f64>,
    pub langid_profiles: Option<PathBuf>,
    pub langid_lexicon: Option<PathBuf>,
    pub min_chars: Option<usize>,
    pub min_words: Option<usize>,
    pub letter_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub holdout: Option<usize>,
    pub threshold: Option<f64>,
    pub max_len: Option<usize>,
    pub vocab_size: Option<usize>,
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<Option<T>> {
    raw.parse().map(Some).map_err(|_| Error::Config {
        line,
        reason: format!("invalid value `{raw}` for `{key}`"),
    })
}

impl Config {
    /// Parses config text. `base` resolves relative paths.
    pub fn parse(src: &str, base: &Path) -> Result<Config> {
        let mut c = Config::default();
        for (idx, raw_line) in src.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, val)) = trimmed.split_once('=') else {
                return Err(Error::Config {
                    line,
                    reason: "expected `key = value`".into(),
                });
            };
            let (key, val) = (key.trim(), val.trim());
            let path = || Some(base.join(val));
            match key {
                "rules" => c.rules = path(),
                "strict_table1" => c.strict_table1 = value(line, key, val)?,
                "langid.margin" => c.langid_margin = value(line, key, val)?,
                "langid.window_coverage" => c.langid_window_coverage = value(line, key, val)?,
                "langid.short_coverage" => c.langid_short_coverage = value(line, key, val)?,
                "langid.profiles" => c.langid_profiles = path(),
                "langid.lexicon" => c.langid_lexicon = path(),
                "length.min_chars" => c.min_chars = value(line, key, val)?,
                "length.min_words" => c.min_words = value(line, key, val)?,
                "non_linguistic.letter_fraction" => c.letter_fraction = value(line, key, val)?,
                "seed" => c.seed = value(line, key, val)?,
                "jobs" => c.jobs = value(line, key, val)?,
                "holdout" => c.holdout = value(line, key, val)?,
                "threshold" => c.threshold = value(line, key, val)?,
                "max_len" => c.max_len = value(line, key, val)?,
                "vocab_size" => c.vocab_size = value(line, key, val)?,
                other => {
                    return Err(Error::Config {
                        line,
                        reason: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&src, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn langid_config(&self) -> LangIdConfig {
        let d = LangIdConfig::default();
        LangIdConfig {
            margin: self.langid_margin.unwrap_or(d.margin),
            window_coverage: self.langid_window_coverage.unwrap_or(d.window_coverage),
            short_coverage: self.langid_short_coverage.unwrap_or(d.short_coverage),
        }
    }

    pub fn lengths(&self) -> LengthThresholds {
        let d = LengthThresholds::default();
        LengthThresholds {
            min_chars: self.min_chars.unwrap_or(d.min_chars),
            min_words: self.min_words.unwrap_or(d.min_words),
        }
    }

    pub fn rule_table(&self) -> Result<RuleTable> {
        match &self.rules {
            Some(p) => {
                let src = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                RuleTable::parse(&src)
            }
            None => Ok(RuleTable::default_table()),
        }
    }

    /// Builds a classifier, reusing the shared bundled language data when no
    /// langid setting differs from the defaults.
    pub fn classifier(&self) -> Result<Classifier> {
        let lid_cfg = self.langid_config();
        let langid = if self.langid_profiles.is_none()
            && self.langid_lexicon.is_none()
            && lid_cfg == LangIdConfig::default()
        {
            LangId::shared()
        } else {
            Arc::new(LangId::load(
                self.langid_profiles.as_deref(),
                self.langid_lexicon.as_deref(),
                lid_cfg,
            )?)
        };
        let mut c = Classifier::new(self.rule_table()?, langid)
            .with_strict_table1(self.strict_table1.unwrap_or(false))
            .with_lengths(self.lengths());
        if let Some(f) = self.letter_fraction {
            c = c.with_letter_fraction(f);
        }
        Ok(c)
    }
}
