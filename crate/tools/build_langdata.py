"""Regenerate crates/core/data/{lexicon_en.txt,profiles.json} from wordfreq's
frequency lists (CC-BY-SA 4.0 data; see crates/core/data/NOTICE).

usage: python3 tools/build_langdata.py /path/to/wordfreq/data
"""
import gzip
import json
import struct
import sys
import unicodedata
from collections import defaultdict
from pathlib import Path

LANGS = ["en", "fr", "es", "it", "de", "pt", "zh", "ja", "ru"]
PROFILE_WORDS = 20000
PROFILE_TRIGRAMS = 4000
# Latin-script profiles are reweighted toward trigrams that separate them:
# weight = freq**DAMPING * (freq / sum of freqs over LATIN)**DISTINCT
LATIN = ["en", "fr", "es", "it", "de", "pt"]
DAMPING = 1 / 3
DISTINCT = 1.0
LEXICON_WORDS = 50000
# drop English-list words that are this much more frequent in another bundled language
FOREIGN_RATIO = 4.0


def unpack(buf, pos=0):
    b = buf[pos]
    pos += 1
    if b <= 0x7F:
        return b, pos
    if 0x80 <= b <= 0x8F:
        return unpack_map(buf, pos, b & 0x0F)
    if 0x90 <= b <= 0x9F:
        return unpack_array(buf, pos, b & 0x0F)
    if 0xA0 <= b <= 0xBF:
        n = b & 0x1F
        return buf[pos:pos + n].decode("utf-8"), pos + n
    if b == 0xC0:
        return None, pos
    if b in (0xC2, 0xC3):
        return b == 0xC3, pos
    if b == 0xCC:
        return buf[pos], pos + 1
    if b == 0xCD:
        return struct.unpack(">H", buf[pos:pos + 2])[0], pos + 2
    if b == 0xCE:
        return struct.unpack(">I", buf[pos:pos + 4])[0], pos + 4
    if b == 0xD9:
        n = buf[pos]
        return buf[pos + 1:pos + 1 + n].decode("utf-8"), pos + 1 + n
    if b == 0xDA:
        n = struct.unpack(">H", buf[pos:pos + 2])[0]
        return buf[pos + 2:pos + 2 + n].decode("utf-8"), pos + 2 + n
    if b == 0xDC:
        n = struct.unpack(">H", buf[pos:pos + 2])[0]
        return unpack_array(buf, pos + 2, n)
    if b == 0xDD:
        n = struct.unpack(">I", buf[pos:pos + 4])[0]
        return unpack_array(buf, pos + 4, n)
    if b >= 0xE0:
        return b - 0x100, pos
    raise ValueError(f"unsupported msgpack byte {b:#x} at {pos - 1}")


def unpack_array(buf, pos, n):
    out = []
    for _ in range(n):
        v, pos = unpack(buf, pos)
        out.append(v)
    return out, pos


def unpack_map(buf, pos, n):
    out = {}
    for _ in range(n):
        k, pos = unpack(buf, pos)
        v, pos = unpack(buf, pos)
        out[k] = v
    return out, pos


def load(datadir, lang, size="small"):
    raw = gzip.decompress((datadir / f"{size}_{lang}.msgpack.gz").read_bytes())
    data, _ = unpack(raw)
    words = []
    for bucket, entries in enumerate(data[1:]):
        freq = 10 ** (-bucket / 100)
        for w in entries:
            words.append((w, freq))
    return words


def trigrams(word):
    chars = " " + word + " "
    return [chars[i:i + 3] for i in range(len(chars) - 2)]


def is_word(w):
    return all(unicodedata.category(c).startswith("L") for c in w)


def main():
    datadir = Path(sys.argv[1])
    out = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"
    raw = {}
    for lang in LANGS:
        counts = defaultdict(float)
        taken = 0
        for w, f in load(datadir, lang):
            if not is_word(w):
                continue
            for t in trigrams(w.lower()):
                counts[t] += f
            taken += 1
            if taken >= PROFILE_WORDS:
                break
        total = sum(counts.values())
        raw[lang] = {k: v / total for k, v in counts.items()}
    profiles = {}
    for lang, freqs in raw.items():
        if lang in LATIN:
            weights = {}
            for t, v in freqs.items():
                shared = sum(raw[o].get(t, 0.0) for o in LATIN)
                weights[t] = v ** DAMPING * (v / shared) ** DISTINCT
        else:
            weights = freqs
        top = sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))[:PROFILE_TRIGRAMS]
        total = sum(v for _, v in top)
        profiles[lang] = {k: v / total for k, v in sorted(top)}
    (out / "profiles.json").write_text(
        json.dumps(profiles, ensure_ascii=False, sort_keys=True, indent=0) + "\n",
        encoding="utf-8",
    )

    foreign = defaultdict(float)
    for lang in LANGS[1:]:
        for w, f in load(datadir, lang):
            w = w.lower()
            foreign[w] = max(foreign[w], f)
    lexicon = []
    seen = set()
    for w, f in load(datadir, "en", "large"):
        w = w.lower()
        if w in seen or not w.isascii() or not w.isalpha():
            continue
        if foreign.get(w, 0.0) > FOREIGN_RATIO * f:
            continue
        seen.add(w)
        lexicon.append(w)
        if len(lexicon) >= LEXICON_WORDS:
            break
    (out / "lexicon_en.txt").write_text("\n".join(sorted(lexicon)) + "\n", encoding="utf-8")
    print(f"profiles: {len(profiles)} langs; lexicon: {len(lexicon)} words")


if __name__ == "__main__":
    main()
