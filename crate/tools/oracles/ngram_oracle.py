"""Brute-force reference for 4-gram probabilities and threshold completion.

Counts are taken by scanning every sentence for every query, with no shared
tables. Writes the random corpora, the queries and the expected answers to a
JSON file that the acceptance tests read; rerunning reproduces it exactly.

    python3 tools/oracles/ngram_oracle.py crates/cli/tests/data/oracles/ngram.json
"""

import json
import random
import sys
from fractions import Fraction

THRESHOLDS = [0.9, 0.5, 0.0]
CAP = 40


def count_after(sentences, context, word):
    n = 0
    for s in sentences:
        if len(s) < 4:
            continue
        for i in range(len(s) - 3):
            if s[i:i + 3] == context and s[i + 3] == word:
                n += 1
    return n


def context_total(sentences, context):
    n = 0
    for s in sentences:
        if len(s) < 4:
            continue
        for i in range(len(s) - 3):
            if s[i:i + 3] == context:
                n += 1
    return n


def prob(sentences, context, word):
    total = context_total(sentences, context)
    if total == 0:
        return Fraction(0)
    return Fraction(count_after(sentences, context, word), total)


def complete(sentences, prefix, threshold, cap):
    out = list(prefix)
    vocab = sorted({w for s in sentences if len(s) >= 4 for w in s})
    while True:
        if len(out) >= cap:
            return out, "MaxLength"
        context = out[-3:]
        if context_total(sentences, context) == 0:
            return out, "NoContinuation"
        best, best_p = None, Fraction(-1)
        for w in vocab:  # ascending, so ties keep the smallest word
            p = prob(sentences, context, w)
            if p > best_p:
                best, best_p = w, p
        if best_p < Fraction(str(threshold)):
            return out, "BelowThreshold"
        out.append(best)


def make_corpus(rng, size, vocab, lo, hi):
    return [[rng.choice(vocab) for _ in range(rng.randint(lo, hi))] for _ in range(size)]


def main(path):
    rng = random.Random(1234)
    cases = []
    specs = [
        (5, "abc", 3, 8),
        (20, "abcd", 3, 10),
        (50, "abcdef", 4, 12),
        (200, "ab", 4, 20),
        (200, "abcdefgh", 2, 15),
        (120, "xyz", 4, 30),
        (80, ["the", "cat", "sat", "on", "mat", "a", "dog", "ran", "ünï"], 3, 12),
        (1, "a", 50, 50),
    ]
    for size, letters, lo, hi in specs:
        vocab = list(letters)
        corpus = make_corpus(rng, size, vocab, lo, hi)
        # a few repeated sentences sharpen the distributions
        corpus += [list(corpus[0])] * 3 if corpus and len(corpus[0]) >= 4 else []
        seen = set()
        for s in corpus:
            for i in range(len(s) - 3):
                seen.add((tuple(s[i:i + 3]), s[i + 3]))
        queries = sorted(seen)
        for _ in range(15):
            ctx = tuple(rng.choice(vocab + ["zz"]) for _ in range(3))
            queries.append((ctx, rng.choice(vocab + ["zz"])))
        probs = []
        for ctx, w in queries:
            p = prob(corpus, list(ctx), w)
            probs.append({"context": list(ctx), "word": w, "num": p.numerator, "den": p.denominator, "p": float(p)})
        prefixes = [s[:4] for s in corpus if len(s) >= 4][:25]
        prefixes += [[rng.choice(vocab) for _ in range(4)] for _ in range(5)]
        completions = []
        for pre in prefixes:
            for t in THRESHOLDS:
                out, reason = complete(corpus, pre, t, CAP)
                completions.append({"prefix": pre, "threshold": t, "max_len": CAP, "output": out, "stop_reason": reason})
        cases.append({"sentences": [" ".join(s) for s in corpus], "probs": probs, "completions": completions})
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"cases": cases}, fh, ensure_ascii=False, indent=0)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
