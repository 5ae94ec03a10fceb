//! Order-4 maximum-likelihood language model and threshold generation.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bleu::sentence_bleu;
use crate::error::{Error, Result};
use crate::langid::LangId;
use crate::stats::{build_vocab, Vocabulary};

pub const ORDER: usize = 4;
pub const DEFAULT_THRESHOLD: f64 = 0.9;
pub const DEFAULT_MAX_LEN: usize = 40;
pub const DEFAULT_HOLDOUT: usize = 10_000;
pub const DEFAULT_VOCAB_SIZE: usize = 10_000;

pub const MODEL_MAGIC: &str = "comsieve-ngram";
pub const MODEL_VERSION: u32 = 1;

type Context = [u32; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Continuations {
    total: u64,
    /// (word id, count), sorted by word id
    next: Vec<(u32, u64)>,
}

impl Continuations {
    /// Most frequent continuation; ties go to the smaller id, which is the
    /// lexicographically smaller token.
    fn best(&self) -> (u32, u64) {
        let mut best = self.next[0];
        for &(w, n) in &self.next[1..] {
            if n > best.1 {
                best = (w, n);
            }
        }
        best
    }
}

/// Counts of next words after every three-token context seen in training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramModel {
    /// Every training token, sorted; ids index into this list.
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    contexts: HashMap<Context, Continuations>,
    vocabulary: Vocabulary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StopReason {
    NoContinuation,
    BelowThreshold,
    MaxLength,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::NoContinuation => "NoContinuation",
            StopReason::BelowThreshold => "BelowThreshold",
            StopReason::MaxLength => "MaxLength",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub prefix: Vec<String>,
    pub output: Vec<String>,
    pub stop_reason: StopReason,
}

impl NGramModel {
    /// Counts every consecutive 4-gram of every sentence. Sentences shorter
    /// than four tokens contribute nothing; no padding is added.
    pub fn train<S: AsRef<str>>(sentences: &[Vec<S>]) -> NGramModel {
        NGramModel::train_with_vocab(sentences, DEFAULT_VOCAB_SIZE)
    }

    pub fn train_with_vocab<S: AsRef<str>>(sentences: &[Vec<S>], vocab_size: usize) -> NGramModel {
        let mut tokens: Vec<String> = sentences
            .iter()
            .filter(|s| s.len() >= ORDER)
            .flat_map(|s| s.iter().map(|t| t.as_ref().to_owned()))
            .collect();
        tokens.sort_unstable();
        tokens.dedup();
        let ids: HashMap<String, u32> = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let mut raw: HashMap<Context, HashMap<u32, u64>> = HashMap::new();
        for s in sentences.iter().filter(|s| s.len() >= ORDER) {
            let seq: Vec<u32> = s.iter().map(|t| ids[t.as_ref()]).collect();
            for w in seq.windows(ORDER) {
                *raw.entry([w[0], w[1], w[2]]).or_default().entry(w[3]).or_default() += 1;
            }
        }
        let contexts = raw
            .into_iter()
            .map(|(ctx, next)| {
                let mut next: Vec<(u32, u64)> = next.into_iter().collect();
                next.sort_unstable();
                let total = next.iter().map(|&(_, n)| n).sum();
                (ctx, Continuations { total, next })
            })
            .collect();
        NGramModel {
            tokens,
            ids,
            contexts,
            vocabulary: build_vocab(sentences, vocab_size),
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn context_count(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    fn context_ids<S: AsRef<str>>(&self, context: &[S]) -> Option<Context> {
        assert_eq!(context.len(), 3, "context must have exactly 3 tokens");
        let id = |t: &S| self.ids.get(t.as_ref()).copied();
        Some([id(&context[0])?, id(&context[1])?, id(&context[2])?])
    }

    /// `count(context, word) / count(context)`; 0 when either is unseen.
    pub fn prob<S: AsRef<str>>(&self, context: &[S], word: &str) -> f64 {
        let Some(c) = self.context_ids(context).and_then(|c| self.contexts.get(&c)) else {
            return 0.0;
        };
        let Some(&w) = self.ids.get(word) else {
            return 0.0;
        };
        match c.next.binary_search_by_key(&w, |&(id, _)| id) {
            Ok(i) => c.next[i].1 as f64 / c.total as f64,
            Err(_) => 0.0,
        }
    }

    /// Raw count of `word` after `context`.
    pub fn count<S: AsRef<str>>(&self, context: &[S], word: &str) -> u64 {
        let Some(c) = self.context_ids(context).and_then(|c| self.contexts.get(&c)) else {
            return 0;
        };
        let Some(&w) = self.ids.get(word) else {
            return 0;
        };
        c.next
            .binary_search_by_key(&w, |&(id, _)| id)
            .map(|i| c.next[i].1)
            .unwrap_or(0)
    }

    /// Every stored (context, word, count) triple, in id order.
    pub fn entries(&self) -> Vec<([&str; 3], &str, u64)> {
        let mut keys: Vec<&Context> = self.contexts.keys().collect();
        keys.sort_unstable();
        let tok = |i: u32| self.tokens[i as usize].as_str();
        keys.into_iter()
            .flat_map(|ctx| {
                self.contexts[ctx]
                    .next
                    .iter()
                    .map(move |&(w, n)| ([tok(ctx[0]), tok(ctx[1]), tok(ctx[2])], tok(w), n))
            })
            .collect()
    }

    /// Extends `prefix` while the most likely next word has probability at
    /// least `threshold`, up to `max_len` tokens in total.
    ///
    /// Panics unless `prefix` has exactly four tokens.
    pub fn complete<S: AsRef<str>>(&self, prefix: &[S], threshold: f64, max_len: usize) -> GenerationResult {
        assert_eq!(prefix.len(), ORDER, "prefix must have exactly 4 tokens");
        let prefix: Vec<String> = prefix.iter().map(|t| t.as_ref().to_owned()).collect();
        let mut output = prefix.clone();
        let stop_reason = loop {
            if output.len() >= max_len {
                break StopReason::MaxLength;
            }
            let Some(c) = self
                .context_ids(&output[output.len() - 3..])
                .and_then(|c| self.contexts.get(&c))
            else {
                break StopReason::NoContinuation;
            };
            let (w, n) = c.best();
            if (n as f64 / c.total as f64) < threshold {
                break StopReason::BelowThreshold;
            }
            output.push(self.tokens[w as usize].clone());
        };
        GenerationResult {
            prefix,
            output,
            stop_reason,
        }
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        let mut keys: Vec<&Context> = self.contexts.keys().collect();
        keys.sort_unstable();
        let file = ModelFile {
            magic: MODEL_MAGIC.to_owned(),
            version: MODEL_VERSION,
            order: ORDER,
            tokens: self.tokens.clone(),
            vocabulary: self.vocabulary.clone(),
            contexts: keys
                .into_iter()
                .map(|k| ContextEntry {
                    context: *k,
                    next: self.contexts[k].next.clone(),
                })
                .collect(),
        };
        serde_json::to_writer(out, &file)?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<NGramModel> {
        let file: ModelFile =
            serde_json::from_reader(input).map_err(|e| Error::Model(e.to_string()))?;
        if file.magic != MODEL_MAGIC {
            return Err(Error::Model(format!("bad magic `{}`", file.magic)));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::Model(format!("unsupported version {}", file.version)));
        }
        if file.order != ORDER {
            return Err(Error::Model(format!("unsupported order {}", file.order)));
        }
        if file.tokens.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Model("token list is not sorted and unique".into()));
        }
        let n = file.tokens.len() as u32;
        let mut contexts = HashMap::with_capacity(file.contexts.len());
        for e in file.contexts {
            let in_range = e.context.iter().all(|&i| i < n)
                && e.next.iter().all(|&(w, c)| w < n && c > 0)
                && !e.next.is_empty()
                && e.next.windows(2).all(|p| p[0].0 < p[1].0);
            if !in_range {
                return Err(Error::Model("invalid context entry".into()));
            }
            let total = e.next.iter().map(|&(_, c)| c).sum();
            contexts.insert(e.context, Continuations { total, next: e.next });
        }
        let ids = file
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(NGramModel {
            tokens: file.tokens,
            ids,
            contexts,
            vocabulary: file.vocabulary,
        })
    }
}

/// On-disk model: a JSON object with `magic`, `version`, `order`, the sorted
/// `tokens` list, the top-K `vocabulary`, and `contexts`, each holding three
/// token ids and a list of `[next_id, count]` pairs.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    magic: String,
    version: u32,
    order: usize,
    tokens: Vec<String>,
    vocabulary: Vocabulary,
    contexts: Vec<ContextEntry>,
}

#[derive(Serialize, Deserialize)]
struct ContextEntry {
    context: Context,
    next: Vec<(u32, u64)>,
}

/// Training sentences and held-out sentences whose first four tokens serve as prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Holdout {
    pub train: Vec<Vec<String>>,
    pub held_out: Vec<Vec<String>>,
    pub warning: Option<String>,
}

impl Holdout {
    pub fn prefixes(&self) -> Vec<Vec<String>> {
        self.held_out.iter().map(|s| s[..ORDER].to_vec()).collect()
    }
}

/// Draws `n` sentences of at least four tokens uniformly without replacement
/// and removes them from training. Shorter sentences are set aside entirely.
pub fn holdout_split(sentences: &[Vec<String>], n: usize, seed: u64) -> Holdout {
    let eligible: Vec<&Vec<String>> = sentences.iter().filter(|s| s.len() >= ORDER).collect();
    let mut warning = None;
    let mut n = n;
    if n >= eligible.len() {
        let scaled = eligible.len().saturating_sub(1);
        warning = Some(format!(
            "holdout of {n} needs more than {} sentences; using {scaled}",
            eligible.len()
        ));
        n = scaled;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, eligible.len(), n).into_vec();
    picked.sort_unstable();
    let mut is_held = vec![false; eligible.len()];
    for &i in &picked {
        is_held[i] = true;
    }
    let held_out = picked.iter().map(|&i| eligible[i].clone()).collect();
    let train = eligible
        .iter()
        .enumerate()
        .filter(|(i, _)| !is_held[*i])
        .map(|(_, s)| (*s).clone())
        .collect();
    Holdout {
        train,
        held_out,
        warning,
    }
}

/// Whether generated text looks like leftover code: a very long token, a token
/// mixing letters with two or more digits, or a one-letter identifier followed
/// by a bare number ("x 5").
pub fn has_code_artifact<S: AsRef<str>>(tokens: &[S]) -> bool {
    let long_or_mixed = tokens.iter().any(|t| {
        let t = t.as_ref();
        let digits = t.chars().filter(char::is_ascii_digit).count();
        t.chars().count() >= 20 || (digits >= 2 && t.chars().any(char::is_alphabetic))
    });
    long_or_mixed
        || tokens.windows(2).any(|w| {
            let (a, b) = (w[0].as_ref(), w[1].as_ref());
            let single_identifier = a.len() == 1
                && a.chars().all(|c| c.is_ascii_alphabetic())
                && a != "a"
                && a != "i";
            single_identifier && !b.is_empty() && b.chars().all(|c| c.is_ascii_digit())
        })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GenCategory {
    pub count: u64,
    /// Fraction of this category's generations with BLEU-4 exactly 1.
    pub bleu_one_fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenAnalysis {
    pub total: u64,
    pub average_length: f64,
    pub length_4: GenCategory,
    pub code_artifacts: GenCategory,
    pub non_english: GenCategory,
    pub all: GenCategory,
}

/// Summarizes generations against their reference sentences.
pub fn analyze_generations(results: &[GenerationResult], references: &[Vec<String>], langid: &LangId) -> GenAnalysis {
    assert_eq!(results.len(), references.len(), "one reference per result");
    #[derive(Default)]
    struct Acc {
        count: u64,
        ones: u64,
    }
    impl Acc {
        fn add(&mut self, one: bool) {
            self.count += 1;
            self.ones += u64::from(one);
        }
        fn finish(&self) -> GenCategory {
            GenCategory {
                count: self.count,
                bleu_one_fraction: if self.count == 0 {
                    0.0
                } else {
                    self.ones as f64 / self.count as f64
                },
            }
        }
    }
    let (mut len4, mut code, mut foreign, mut all) =
        (Acc::default(), Acc::default(), Acc::default(), Acc::default());
    let mut total_len = 0usize;
    for (r, reference) in results.iter().zip(references) {
        let one = !r.output.is_empty()
            && !reference.is_empty()
            && sentence_bleu(&r.output, reference, 4) == 1.0;
        all.add(one);
        total_len += r.output.len();
        if r.output.len() == ORDER {
            len4.add(one);
        }
        if has_code_artifact(&r.output) {
            code.add(one);
        }
        if !langid.is_english(&r.output.join(" ")) {
            foreign.add(one);
        }
    }
    GenAnalysis {
        total: results.len() as u64,
        average_length: if results.is_empty() {
            0.0
        } else {
            total_len as f64 / results.len() as f64
        },
        length_4: len4.finish(),
        code_artifacts: code.finish(),
        non_english: foreign.finish(),
        all: all.finish(),
    }
}
