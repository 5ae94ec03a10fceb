"""Direct-from-formula sentence BLEU-4 on random token pairs.

BLEU = BP * exp(mean(log p_n)) for n = 1..4 with clipped n-gram precisions
p_n, BP = 1 if c > r else exp(1 - r / c), and 0 whenever some p_n is 0.
Writes the pairs and scores for the acceptance tests.

    python3 tools/oracles/bleu_oracle.py crates/cli/tests/data/oracles/bleu.json
"""

import json
import math
import random
import sys
from collections import Counter


def grams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(cand, ref):
    logs = []
    for n in range(1, 5):
        c = grams(cand, n)
        r = grams(ref, n)
        total = sum(c.values())
        clipped = sum(min(k, r[g]) for g, k in c.items())
        if total == 0 or clipped == 0:
            return 0.0
        logs.append(math.log(clipped / total))
    bp = 1.0 if len(cand) > len(ref) else math.exp(1 - len(ref) / len(cand))
    return bp * math.exp(sum(logs) / 4)


def main(path):
    rng = random.Random(99)
    pairs = []
    while len(pairs) < 500:
        vocab = [chr(ord("a") + i) for i in range(rng.randint(2, 8))]
        ref = [rng.choice(vocab) for _ in range(rng.randint(1, 25))]
        mode = rng.random()
        if mode < 0.4:
            # edit a copy of the reference so that higher-order matches survive
            cand = list(ref)
            for _ in range(rng.randint(0, 4)):
                op = rng.random()
                if op < 0.4 and cand:
                    cand[rng.randrange(len(cand))] = rng.choice(vocab)
                elif op < 0.7 and len(cand) > 1:
                    del cand[rng.randrange(len(cand))]
                else:
                    cand.insert(rng.randrange(len(cand) + 1), rng.choice(vocab))
        else:
            cand = [rng.choice(vocab) for _ in range(rng.randint(1, 25))]
        pairs.append({"candidate": cand, "reference": ref, "bleu": bleu(cand, ref)})
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"pairs": pairs}, fh, indent=0)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
