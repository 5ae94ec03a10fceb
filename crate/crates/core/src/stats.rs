//! Category prevalence, comments-per-file histograms, vocabularies and
//! vocabulary overlap.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::categorize::{Category, CategorySet, ClassifyContext, Classifier, Group};
use crate::extract::{CommentKind, CommentUnit};
use crate::pipeline::{dedup_key, normalize_joined, CorpusRecord};

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const SPECIALS: [&str; 3] = [UNK, BOS, EOS];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub all: u64,
    pub docstrings: u64,
}

impl Cell {
    fn add(&mut self, docstring: bool) {
        self.all += 1;
        if docstring {
            self.docstrings += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub label: String,
    pub with_dups: Cell,
    pub without_dups: Cell,
}

/// Table of comment counts per group and per category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub groups: Vec<CategoryRow>,
    pub categories: Vec<CategoryRow>,
    pub total: CategoryRow,
}

/// Incremental builder for [`CategoryCounts`]. Units must arrive in corpus order.
#[derive(Debug, Clone)]
pub struct CategoryTally {
    groups: BTreeMap<Group, (Cell, Cell)>,
    categories: BTreeMap<Category, (Cell, Cell)>,
    total: (Cell, Cell),
    seen: HashSet<u128>,
}

impl Default for CategoryTally {
    fn default() -> Self {
        CategoryTally {
            groups: Group::ALL.iter().map(|&g| (g, Default::default())).collect(),
            categories: Category::ALL.iter().map(|&c| (c, Default::default())).collect(),
            total: Default::default(),
            seen: HashSet::new(),
        }
    }
}

/// Text identity used for the duplicate columns: the normalized text, or the
/// raw text when normalization leaves nothing.
pub fn duplicate_key(raw: &str) -> u128 {
    let n = normalize_joined(raw);
    if n.is_empty() {
        dedup_key(raw)
    } else {
        dedup_key(&n)
    }
}

impl CategoryTally {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one comment. `categories` should not contain `Duplicate`; that is
    /// derived here from `key`.
    pub fn add(&mut self, kind: CommentKind, categories: CategorySet, key: u128) {
        let doc = kind == CommentKind::Docstring;
        let mut cats = categories;
        cats.remove(Category::Duplicate);
        let first = self.seen.insert(key);
        if !first {
            cats.insert(Category::Duplicate);
        }
        let bump = |(with, without): &mut (Cell, Cell)| {
            with.add(doc);
            if first {
                without.add(doc);
            }
        };
        bump(&mut self.total);
        for c in cats.iter() {
            bump(self.categories.get_mut(&c).unwrap());
        }
        for g in cats.groups() {
            bump(self.groups.get_mut(&g).unwrap());
        }
    }

    pub fn finish(self) -> CategoryCounts {
        let row = |label: &str, (with_dups, without_dups): (Cell, Cell)| CategoryRow {
            label: label.to_owned(),
            with_dups,
            without_dups,
        };
        CategoryCounts {
            groups: Group::ALL.iter().map(|g| row(g.name(), self.groups[g])).collect(),
            categories: Category::ALL
                .iter()
                .map(|c| row(c.name(), self.categories[c]))
                .collect(),
            total: row("Total", self.total),
        }
    }
}

/// Counts per category with and without duplicates, split by docstrings.
/// Units without a record are counted with no categories.
pub fn category_table(records: &[CorpusRecord], units: &[CommentUnit]) -> CategoryCounts {
    let by_id: HashMap<u64, &CorpusRecord> = records.iter().map(|r| (r.id, r)).collect();
    let keys: Vec<u128> = units.par_iter().map(|u| duplicate_key(&u.raw_text)).collect();
    let mut tally = CategoryTally::new();
    for (u, key) in units.iter().zip(keys) {
        let cats = by_id.get(&u.id).map(|r| r.categories).unwrap_or_default();
        tally.add(u.kind, cats, key);
    }
    tally.finish()
}

/// Classifies units directly (lowercased text, per-file context) for reports
/// that have no filter records.
pub fn classify_units(units: &[CommentUnit], classifier: &Classifier) -> Vec<CategorySet> {
    let mut ctx: HashMap<&str, ClassifyContext> = HashMap::new();
    for u in units {
        let e = ctx.entry(u.file.as_str()).or_default();
        e.file_has_antlr |= crate::categorize::mentions_antlr(&u.raw_text);
    }
    units
        .par_iter()
        .map(|u| classifier.classify(&u.raw_text.to_lowercase(), ctx[u.file.as_str()]))
        .collect()
}

impl CategoryCounts {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let header = ["", "with dups: all", "docstrings", "without dups: all", "docstrings"];
        let mut rows: Vec<[String; 5]> = Vec::new();
        let fmt = |r: &CategoryRow| {
            [
                r.label.clone(),
                r.with_dups.all.to_string(),
                r.with_dups.docstrings.to_string(),
                r.without_dups.all.to_string(),
                r.without_dups.docstrings.to_string(),
            ]
        };
        rows.extend(self.groups.iter().map(fmt));
        rows.extend(self.categories.iter().map(|r| {
            let mut f = fmt(r);
            f[0] = format!("  {}", f[0]);
            f
        }));
        rows.push(fmt(&self.total));
        let widths: Vec<usize> = (0..5)
            .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap())
            .collect();
        let mut line = |cells: [&str; 5]| {
            let _ = write!(out, "{:<w$}", cells[0], w = widths[0]);
            for i in 1..5 {
                let _ = write!(out, "  {:>w$}", cells[i], w = widths[i]);
            }
            out.push('\n');
        };
        line(header);
        for r in &rows {
            line([&r[0], &r[1], &r[2], &r[3], &r[4]]);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,with_dups_all,with_dups_docstrings,without_dups_all,without_dups_docstrings\n");
        for r in self.groups.iter().chain(&self.categories).chain([&self.total]) {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.label, r.with_dups.all, r.with_dups.docstrings, r.without_dups.all, r.without_dups.docstrings
            );
        }
        out
    }
}

/// Comments-per-file bucket labels, in order.
pub const BUCKETS: [&str; 14] = [
    "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11-100", "100-2000", "outliers",
];

/// Bucket index for a per-file comment count. 100 goes to "100-2000".
pub fn bucket_of(comments: usize) -> usize {
    match comments {
        0..=10 => comments,
        11..=99 => 11,
        100..=2000 => 12,
        _ => 13,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub bucket: String,
    pub files: u64,
    pub loc: u64,
    pub loc_avg: f64,
}

/// Files bucketed by their number of comment units. `files` lists every opened
/// file with its line count, including files without comments.
pub fn comments_per_file_histogram(files: &[(String, usize)], units: &[CommentUnit]) -> Vec<HistogramRow> {
    let mut per_file: HashMap<&str, usize> = HashMap::new();
    for u in units {
        *per_file.entry(u.file.as_str()).or_default() += 1;
    }
    let mut acc = [(0u64, 0u64); BUCKETS.len()];
    for (path, loc) in files {
        let b = bucket_of(per_file.get(path.as_str()).copied().unwrap_or(0));
        acc[b].0 += 1;
        acc[b].1 += *loc as u64;
    }
    BUCKETS
        .iter()
        .zip(acc)
        .map(|(label, (files, loc))| HistogramRow {
            bucket: (*label).to_owned(),
            files,
            loc,
            loc_avg: if files == 0 {
                0.0
            } else {
                (loc as f64 / files as f64 * 100.0).round() / 100.0
            },
        })
        .collect()
}

pub fn histogram_csv(rows: &[HistogramRow]) -> String {
    let mut out = String::from("bucket,files,loc,loc_avg\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{:.2}", r.bucket, r.files, r.loc, r.loc_avg);
    }
    out
}

pub fn histogram_text(rows: &[HistogramRow]) -> String {
    let files: u64 = rows.iter().map(|r| r.files).sum();
    let loc: u64 = rows.iter().map(|r| r.loc).sum();
    let avg = if files == 0 { 0.0 } else { loc as f64 / files as f64 };
    let mut out = format!("{:<10}  {:>10}  {:>12}  {:>10}\n", "comments", "# files", "# loc", "loc avg");
    for r in rows {
        let _ = writeln!(out, "{:<10}  {:>10}  {:>12}  {:>10.2}", r.bucket, r.files, r.loc, r.loc_avg);
    }
    let _ = writeln!(out, "{:<10}  {:>10}  {:>12}  {:>10.2}", "Total", files, loc, avg);
    out
}

/// Top-K tokens by frequency plus the three special tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub tokens: Vec<String>,
    pub frequencies: BTreeMap<String, u64>,
}

impl Vocabulary {
    pub fn contains(&self, token: &str) -> bool {
        self.tokens.iter().any(|t| t == token)
    }

    pub fn token_set(&self) -> BTreeSet<String> {
        self.tokens.iter().cloned().collect()
    }
}

/// Keeps the `k` most frequent tokens (ties broken lexicographically), then
/// appends `<unk>`, `<s>` and `</s>`.
pub fn build_vocab<S: AsRef<str>>(sentences: &[Vec<S>], k: usize) -> Vocabulary {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for s in sentences {
        for t in s {
            *counts.entry(t.as_ref()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked.truncate(k);
    let frequencies: BTreeMap<String, u64> = ranked.iter().map(|&(t, n)| (t.to_owned(), n)).collect();
    let tokens = ranked
        .iter()
        .map(|&(t, _)| t.to_owned())
        .chain(SPECIALS.iter().map(|s| s.to_string()))
        .collect();
    Vocabulary { tokens, frequencies }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapRegion {
    /// Names of the vocabularies that contain the region's tokens, and no others.
    pub members: Vec<String>,
    pub count: u64,
}

/// Sizes of the 15 regions of a four-set Venn diagram, ordered by the bitmask
/// of member sets (first set is the lowest bit).
pub fn vocab_overlap(names: [&str; 4], sets: [&BTreeSet<String>; 4]) -> Vec<OverlapRegion> {
    let mut counts = [0u64; 16];
    let union: BTreeSet<&String> = sets.iter().flat_map(|s| s.iter()).collect();
    for tok in union {
        let mask = (0..4).filter(|&i| sets[i].contains(tok)).fold(0, |m, i| m | (1 << i));
        counts[mask] += 1;
    }
    (1..16)
        .map(|mask| OverlapRegion {
            members: (0..4)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| names[i].to_owned())
                .collect(),
            count: counts[mask],
        })
        .collect()
}
