//! Sentence-level BLEU without smoothing.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const BUCKETS: usize = 20;
pub const BUCKET_WIDTH: f64 = 0.05;

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts
                .entry(w.iter().map(AsRef::as_ref).collect())
                .or_default() += 1;
        }
    }
    counts
}

/// Clipped matches and candidate n-gram total for order `n`.
pub fn modified_precision<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T], n: usize) -> (u64, u64) {
    let cand = ngram_counts(candidate, n);
    let refc = ngram_counts(reference, n);
    let matched = cand
        .iter()
        .map(|(g, &c)| c.min(refc.get(g).copied().unwrap_or(0)))
        .sum();
    let total = cand.values().sum();
    (matched, total)
}

/// Geometric mean of modified 1..=`max_n` gram precisions with uniform weights,
/// times the brevity penalty. Any zero precision gives 0.
///
/// Panics if either sequence is empty.
pub fn sentence_bleu<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T], max_n: usize) -> f64 {
    assert!(!candidate.is_empty() && !reference.is_empty(), "BLEU needs nonempty sequences");
    let mut log_sum = 0.0;
    let mut all_exact = true;
    for n in 1..=max_n {
        let (matched, total) = modified_precision(candidate, reference, n);
        if matched == 0 || total == 0 {
            return 0.0;
        }
        all_exact &= matched == total;
        log_sum += (matched as f64 / total as f64).ln();
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    if all_exact && bp == 1.0 {
        return 1.0;
    }
    (bp * (log_sum / max_n as f64).exp()).min(1.0)
}

/// Bucket index of a score: `[0, 0.05)`, ..., `[0.95, 1.0]`.
pub fn bucket_of(score: f64) -> usize {
    ((score / BUCKET_WIDTH).floor() as usize).min(BUCKETS - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    pub scores: Vec<f64>,
    pub histogram: Vec<u64>,
    pub ones: u64,
    pub zeros: u64,
    pub mean: f64,
}

/// Scores aligned (candidate, reference) pairs. Pairs with an empty side score 0.
pub fn score_distribution<S: AsRef<str>, T: AsRef<str>>(pairs: &[(Vec<S>, Vec<T>)]) -> BleuReport {
    let scores: Vec<f64> = pairs
        .iter()
        .map(|(c, r)| {
            if c.is_empty() || r.is_empty() {
                0.0
            } else {
                sentence_bleu(c, r, 4)
            }
        })
        .collect();
    let mut histogram = vec![0u64; BUCKETS];
    for &s in &scores {
        histogram[bucket_of(s)] += 1;
    }
    BleuReport {
        ones: scores.iter().filter(|&&s| s == 1.0).count() as u64,
        zeros: scores.iter().filter(|&&s| s == 0.0).count() as u64,
        mean: if scores.is_empty() {
            0.0
        } else {
            scores.iter().sum::<f64>() / scores.len() as f64
        },
        scores,
        histogram,
    }
}

impl BleuReport {
    /// `bucket_low,bucket_high,count` rows.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bucket_low,bucket_high,count\n");
        for (i, n) in self.histogram.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:.2},{:.2},{}",
                i as f64 * BUCKET_WIDTH,
                (i + 1) as f64 * BUCKET_WIDTH,
                n
            );
        }
        out
    }
}
