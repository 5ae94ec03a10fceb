//! Acceptance suite. Each test covers one criterion and prints a single
//! `criterion N: PASS|FAIL|SKIP ...` line (visible with `--nocapture`).
//! Criterion 8 lives in `throughput.rs` because it is slow.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use comsieve::bleu::sentence_bleu;
use comsieve::categorize::{ClassifyContext, RuleKind};
use comsieve::corpus::{extract_files, FileComments};
use comsieve::extract::{extract_from_text, number_units};
use comsieve::ingest::walk_corpus;
use comsieve::ngram::{analyze_generations, holdout_split, GenerationResult, NGramModel};
use comsieve::pipeline::{
    dedup, run, split_sentences, DropReason, PipelineConfig, Stage,
};
use comsieve::{Category, Classifier, CommentKind, CommentUnit, CorpusRecord, RuleTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(rel)
}

fn verdict(n: u32, what: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {n}: PASS {what}");
    } else {
        println!("criterion {n}: FAIL {what} ({} problems)", failures.len());
        for f in failures.iter().take(20) {
            println!("  {f}");
        }
        panic!("criterion {n} failed: {}", failures[0]);
    }
}

/// Mini-corpus files in walk order, units numbered across the corpus.
fn mini_corpus() -> Vec<FileComments> {
    let root = data("mini");
    let walk = walk_corpus(&root, "py").unwrap();
    let mut next = 0;
    extract_files(&root, &walk.paths)
        .into_iter()
        .map(|r| {
            let mut f = r.expect("mini-corpus decodes");
            next = number_units(&mut f.units, next);
            f
        })
        .collect()
}

fn mini_units() -> Vec<CommentUnit> {
    mini_corpus().into_iter().flat_map(|f| f.units).collect()
}

/// (file, start_line) -> (kind, categories)
fn mini_labels() -> HashMap<(String, usize), (String, BTreeSet<String>)> {
    let text = std::fs::read_to_string(data("mini_labels.tsv")).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let cats = if f[3] == "-" {
                BTreeSet::new()
            } else {
                f[3].split(',').map(str::to_owned).collect()
            };
            ((f[0].to_owned(), f[1].parse().unwrap()), (f[2].to_owned(), cats))
        })
        .collect()
}

fn kind_name(k: CommentKind) -> &'static str {
    match k {
        CommentKind::LineBlock => "line",
        CommentKind::Docstring => "docstring",
    }
}

// ---------------------------------------------------------------- 1

/// (category, verbatim pattern, positives, negatives)
type Row = (Category, &'static str, [&'static str; 3], [&'static str; 3]);

const TABLE1: &[Row] = &[
    (
        Category::Copyright,
        "copyright",
        [
            "Copyright 2020 Example Corp.",
            "(C) COPYRIGHT the contributors",
            "this is copyrighted material",
        ],
        ["copy right of the file", "all rights reserved", "(c) 2020 Example Corp."],
    ),
    (
        Category::CodeCallsite,
        r"[\w\d]+\s*(={1,2}|\.?)\s*[\w\d_]+\.?[\w\d_]+\(.*\)",
        [
            "result = parser.parse(tokens)",
            "see obj.foo(bar) for details",
            "check that x == compute(y) holds",
        ],
        ["call the function with no arguments", "apply f(x) to each value", "use foo ( bar ) here"],
    ),
    (
        Category::CodeAssignment,
        r"[\w\d]+\s*={1,2}\s*[\d]+",
        ["x = 5", "only when retries==3 in tests", "set timeout = 30 seconds"],
        ["x = y", "the = sign alone", "value: 5 items"],
    ),
    (
        Category::HashValue,
        r"[a-f0-9]{32,64}",
        [
            "md5 d41d8cd98f00b204e9800998ecf8427e",
            "sha1 da39a3ee5e6b4b0d3255bfef95601890afd80709 of nothing",
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
        ],
        [
            "short d41d8cd98f00b204e9800998ecf8427",
            "upper D41D8CD98F00B204E9800998ECF8427E",
            "blob e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855aa",
        ],
    ),
    (
        Category::Latex,
        r"(\\begin\{\w+\})|(\{?\\(alpha|beta|gamma|omega|lambda)\}?)|(\\\\?mathbf\{[\w]{0,5}\})",
        [r"\begin{align} x \end{align}", r"learning rate \alpha", r"weights \mathbf{W}"],
        ["begin{align} without a backslash", "the alpha release", r"\mathbf{toolongname}"],
    ),
    (
        Category::SageMath,
        r"sage:\s*([\w\d]+\s*(={1,2}|\.?)\s*[\w\d_]+\.?[\w\d_]+\(.*\))?",
        [
            "    sage: F.display() # display names of homogeneous components",
            "    sage: M = Manifold(2, 'M')",
            "sage:",
        ],
        ["sage : x", "Sage: x = polygen(QQ)", "the sage library"],
    ),
    (
        Category::Html,
        r"<[^>]*>",
        ["<b>bold</b>", "line<br/>break", "a <div class='x'> block"],
        ["a < b", "x > y", "<unclosed tag"],
    ),
    (
        Category::Antlr,
        r"\$ANTLR|type:",
        ["$ANTLR 3.1 Expr.g", "generated by $antlr", "type: int"],
        ["ANTLR grammar", "type : int", "the token type is int"],
    ),
    (
        Category::EncodingDirective,
        r"-\*-\s*coding[:=]\s*[-\w.]+\s*-\*-",
        ["-*- coding: utf-8 -*-", "vim: set fileencoding=utf-8 :", "# -*- coding: latin-1 -*-"],
        ["this file uses utf-8", "coding style guide", "the encoding is utf-8"],
    ),
];

#[test]
fn criterion_01_table1_fidelity() {
    let started = Instant::now();
    let table = RuleTable::default_table();
    let mut failures = Vec::new();
    let mut checks = 0;
    for (cat, pattern, pos, neg) in TABLE1 {
        let rules: Vec<_> = table.rules().iter().filter(|r| r.category == *cat).collect();
        if !rules.iter().any(|r| r.pattern == *pattern) {
            failures.push(format!("{cat}: pattern not transcribed verbatim"));
        }
        let fires = |t: &str| rules.iter().any(|r| r.kind != RuleKind::Builtin && r.is_match(t));
        for t in pos {
            checks += 1;
            if !fires(t) {
                failures.push(format!("{cat}: expected a match on {t:?}"));
            }
        }
        for t in neg {
            checks += 1;
            if fires(t) {
                failures.push(format!("{cat}: unexpected match on {t:?}"));
            }
        }
    }
    // the guarded Antlr alternative, as the classifier applies it
    let c = Classifier::shared();
    let in_antlr_file = ClassifyContext { file_has_antlr: true };
    let elsewhere = ClassifyContext::default();
    if !c.classify("type: the token type", in_antlr_file).contains(Category::Antlr) {
        failures.push("type: should be Antlr in a file mentioning $ANTLR".into());
    }
    if c.classify("type: the token type", elsewhere).contains(Category::Antlr) {
        failures.push("type: should not be Antlr elsewhere".into());
    }
    let strict = Classifier::shared().clone().with_strict_table1(true);
    if !strict.classify("type: the token type", elsewhere).contains(Category::Antlr) {
        failures.push("strict mode should apply type: everywhere".into());
    }
    let elapsed = started.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        failures.push(format!("took {elapsed:?}"));
    }
    verdict(1, &format!("{checks} rule cases in {elapsed:.1?}"), &failures);
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_02_filter_ordering() {
    let unit = CommentUnit {
        id: 0,
        file: "enc.py".into(),
        start_line: 1,
        end_line: 1,
        column: 0,
        kind: CommentKind::LineBlock,
        raw_text: "-*- coding: utf-8 -*-".into(),
    };
    let mut failures = Vec::new();
    let good = &run(std::slice::from_ref(&unit), &PipelineConfig::advanced())[0];
    if good.drop_reason != Some(DropReason::Category(Category::EncodingDirective)) {
        failures.push(format!("advanced: {:?}", good.drop_reason));
    }
    let misordered = PipelineConfig::advanced().with_stages(&Stage::PUNCTUATION_FIRST);
    let bad = &run(std::slice::from_ref(&unit), &misordered)[0];
    if bad.drop_reason != Some(DropReason::Length) {
        failures.push(format!("punctuation first: {:?}", bad.drop_reason));
    }
    if bad.categories.contains(Category::EncodingDirective) {
        failures.push("punctuation first still recognized the directive".into());
    }
    verdict(2, "EncodingDirective in order, length only when punctuation goes first", &failures);
}

// ---------------------------------------------------------------- 3

fn kept_texts(records: &[CorpusRecord]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_kept()) {
        *m.entry(r.normalized.clone().unwrap()).or_insert(0) += 1;
    }
    m
}

#[test]
fn criterion_03_superset_and_labels() {
    let files = mini_corpus();
    let labels = mini_labels();
    let mut failures = Vec::new();
    if files.len() != 50 {
        failures.push(format!("{} files", files.len()));
    }

    let (mut tp, mut fp, mut fneg) = (0u32, 0u32, 0u32);
    let mut labeled_seen = 0;
    let c = Classifier::shared();
    for f in &files {
        let ctx = ClassifyContext::for_file(f.units.iter().map(|u| u.raw_text.as_str()));
        for u in &f.units {
            let Some((kind, want)) = labels.get(&(u.file.clone(), u.start_line)) else {
                failures.push(format!("unlabeled comment {}:{}", u.file, u.start_line));
                continue;
            };
            labeled_seen += 1;
            if kind != kind_name(u.kind) {
                failures.push(format!("{}:{} is {kind}", u.file, u.start_line));
            }
            let got: BTreeSet<String> = c.classify(&u.raw_text, ctx).names().into_iter().map(str::to_owned).collect();
            tp += got.intersection(want).count() as u32;
            fp += got.difference(want).count() as u32;
            fneg += want.difference(&got).count() as u32;
            if &got != want {
                failures.push(format!("{}:{} labels {want:?} got {got:?}", u.file, u.start_line));
            }
        }
    }
    if labeled_seen != labels.len() {
        failures.push(format!("{} labels but {labeled_seen} comments matched", labels.len()));
    }
    let precision = tp as f64 / (tp + fp).max(1) as f64;
    let recall = tp as f64 / (tp + fneg).max(1) as f64;

    let units: Vec<CommentUnit> = files.into_iter().flat_map(|f| f.units).collect();
    let basic = kept_texts(&run(&units, &PipelineConfig::basic()));
    let advanced = kept_texts(&run(&units, &PipelineConfig::advanced()));
    for (text, n) in &advanced {
        if basic.get(text).copied().unwrap_or(0) < *n {
            failures.push(format!("advanced keeps {text:?} {n}x, basic fewer"));
        }
    }
    let kb: usize = basic.values().sum();
    let ka: usize = advanced.values().sum();
    if ka >= kb {
        failures.push(format!("advanced kept {ka}, basic {kb}"));
    }
    verdict(
        3,
        &format!(
            "{} comments, precision {precision:.3} recall {recall:.3}, kept basic {kb} >= advanced {ka}",
            units.len()
        ),
        &failures,
    );
}

// ---------------------------------------------------------------- 4

fn dedup_checks(name: &str, records: &[CorpusRecord], failures: &mut Vec<String>) {
    let again = dedup(records.to_vec());
    if again != records {
        failures.push(format!("{name}: dedup is not idempotent"));
    }
    let kept = kept_texts(records);
    if let Some((t, n)) = kept.iter().find(|(_, &n)| n > 1) {
        failures.push(format!("{name}: {t:?} kept {n} times"));
    }
}

#[test]
fn criterion_04_dedup() {
    let mut failures = Vec::new();
    let units = mini_units();
    let mini = run(&units, &PipelineConfig::advanced());
    dedup_checks("mini", &mini, &mut failures);
    let mini_dups = mini
        .iter()
        .filter(|r| r.drop_reason == Some(DropReason::Category(Category::Duplicate)))
        .count();
    if mini_dups == 0 {
        failures.push("mini: no duplicates found".into());
    }

    // 60k distinct comments plus 40k copies that differ only in case and punctuation
    const TOTAL: usize = 100_000;
    const PLANTED: usize = 40_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let words = ["cache", "queue", "table", "record", "value", "index", "stream", "buffer"];
    let original = |i: usize| {
        format!(
            "Record {i} keeps the {} for key {} in the {}.",
            words[i % 8],
            i * 7,
            words[(i / 8) % 8]
        )
    };
    let mut texts: Vec<(String, Option<usize>)> = (0..TOTAL - PLANTED).map(|i| (original(i), None)).collect();
    for _ in 0..PLANTED {
        let src = rng.random_range(0..TOTAL - PLANTED);
        let noisy = original(src).to_uppercase().replace(' ', " -- ").replace('.', "!!");
        let at = rng.random_range(0..=texts.len());
        texts.insert(at, (noisy, Some(src)));
    }
    let synthetic: Vec<CommentUnit> = texts
        .iter()
        .enumerate()
        .map(|(i, (t, _))| CommentUnit {
            id: i as u64,
            file: format!("gen/{}.py", i / 100),
            start_line: 1 + i % 100,
            end_line: 1 + i % 100,
            column: 0,
            kind: CommentKind::LineBlock,
            raw_text: t.clone(),
        })
        .collect();
    let records = run(&synthetic, &PipelineConfig::basic());
    dedup_checks("synthetic", &records, &mut failures);
    let found = records
        .iter()
        .filter(|r| r.drop_reason == Some(DropReason::Category(Category::Duplicate)))
        .count();
    if found != PLANTED {
        failures.push(format!("synthetic: {found} duplicates found, {PLANTED} planted"));
    }
    let kept = records.iter().filter(|r| r.is_kept()).count();
    if kept != TOTAL - PLANTED {
        failures.push(format!("synthetic: {kept} kept"));
    }
    verdict(
        4,
        &format!("mini {mini_dups} duplicates; synthetic {found}/{PLANTED} planted duplicates recovered"),
        &failures,
    );
}

// ---------------------------------------------------------------- 5

#[test]
fn criterion_05_ngram_oracle() {
    let oracle: Value = serde_json::from_str(&std::fs::read_to_string(data("oracles/ngram.json")).unwrap()).unwrap();
    let mut failures = Vec::new();
    let (mut probs, mut completions) = (0, 0);
    for case in oracle["cases"].as_array().unwrap() {
        let sentences: Vec<Vec<String>> = case["sentences"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().split(' ').filter(|t| !t.is_empty()).map(str::to_owned).collect())
            .collect();
        assert!(sentences.len() <= 203);
        let model = NGramModel::train(&sentences);
        for q in case["probs"].as_array().unwrap() {
            probs += 1;
            let ctx: Vec<&str> = q["context"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
            let word = q["word"].as_str().unwrap();
            let want = q["num"].as_f64().unwrap() / q["den"].as_f64().unwrap();
            let got = model.prob(&ctx, word);
            if (got - want).abs() > 1e-12 {
                failures.push(format!("prob({ctx:?}, {word}) = {got}, oracle {want}"));
            }
        }
        for q in case["completions"].as_array().unwrap() {
            completions += 1;
            let prefix: Vec<&str> = q["prefix"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
            let threshold = q["threshold"].as_f64().unwrap();
            let max_len = q["max_len"].as_u64().unwrap() as usize;
            let r = model.complete(&prefix, threshold, max_len);
            let want: Vec<&str> = q["output"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
            let reason = q["stop_reason"].as_str().unwrap();
            if r.output != want || r.stop_reason.to_string() != reason {
                failures.push(format!(
                    "complete({prefix:?}, {threshold}) = {:?} {}, oracle {want:?} {reason}",
                    r.output, r.stop_reason
                ));
            }
        }
    }
    verdict(5, &format!("{probs} probabilities, {completions} completions"), &failures);
}

// ---------------------------------------------------------------- 6

#[test]
fn criterion_06_bleu_oracle() {
    let oracle: Value = serde_json::from_str(&std::fs::read_to_string(data("oracles/bleu.json")).unwrap()).unwrap();
    let mut failures = Vec::new();
    let toks = |v: &Value| -> Vec<String> {
        v.as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_owned()).collect()
    };
    let pairs = oracle["pairs"].as_array().unwrap();
    for p in pairs {
        let (c, r) = (toks(&p["candidate"]), toks(&p["reference"]));
        let want = p["bleu"].as_f64().unwrap();
        let got = sentence_bleu(&c, &r, 4);
        if (got - want).abs() > 1e-9 {
            failures.push(format!("{c:?} / {r:?}: {got} vs {want}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.random_range(4..30);
        let s: Vec<String> = (0..n).map(|_| format!("w{}", rng.random_range(0..6))).collect();
        let other: Vec<String> = (0..rng.random_range(1..30)).map(|_| format!("v{}", rng.random_range(0..6))).collect();
        let identity = sentence_bleu(&s, &s, 4);
        if identity != 1.0 {
            failures.push(format!("identity on {n} tokens scored {identity}"));
        }
        if sentence_bleu(&s, &other, 4) != 0.0 {
            failures.push("unigram-disjoint pair scored above 0".into());
        }
    }
    verdict(6, &format!("{} oracle pairs, 200 identity and disjoint pairs", pairs.len()), &failures);
}

// ---------------------------------------------------------------- 7

fn comsieve(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_comsieve")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

/// Runs the whole chain into `dir` and returns every output except manifests.
fn chain(dir: &Path, jobs: &str) -> BTreeMap<String, Vec<u8>> {
    let root = data("mini");
    let p = |name: &str| dir.join(name).to_str().unwrap().to_owned();
    let j = ["--jobs", jobs];
    comsieve(&[&j[..], &["extract", "--root", root.to_str().unwrap(), "--out", &p("units.jsonl")]].concat());
    comsieve(&[&j[..], &["filter", "--mode", "advanced", "--in", &p("units.jsonl"), "--out", &p("records.jsonl"), "--report", &p("filter.json"), "--sentences", &p("sentences.txt")]].concat());
    comsieve(&[&j[..], &["train", "--in", &p("sentences.txt"), "--model", &p("model.json"), "--holdout", "20", "--seed", "42"]].concat());
    comsieve(&[&j[..], &["generate", "--model", &p("model.json"), "--prefixes", &p("model.json.prefixes.txt"), "--out", &p("generated.txt")]].concat());
    comsieve(&[&j[..], &["bleu", "--candidates", &p("generated.txt"), "--references", &p("model.json.references.txt"), "--out-prefix", &p("scores")]].concat());
    let mut outputs = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_owned();
        if !name.ends_with(".manifest.json") {
            outputs.insert(name, std::fs::read(&path).unwrap());
        }
    }
    outputs
}

#[test]
fn criterion_07_end_to_end_determinism() {
    let mut failures = Vec::new();
    let runs: Vec<(String, BTreeMap<String, Vec<u8>>)> = ["1", "8", "8", "1"]
        .iter()
        .map(|jobs| {
            let dir = tempfile::tempdir().unwrap();
            (jobs.to_string(), chain(dir.path(), jobs))
        })
        .collect();
    let (_, first) = &runs[0];
    if first.len() < 10 {
        failures.push(format!("only {} output files", first.len()));
    }
    if first.get("generated.txt").is_none_or(|g| g.is_empty()) {
        failures.push("nothing generated".into());
    }
    for (jobs, outputs) in &runs[1..] {
        if outputs.keys().ne(first.keys()) {
            failures.push(format!("--jobs {jobs}: different output files"));
        }
        for (name, bytes) in outputs {
            if first.get(name) != Some(bytes) {
                failures.push(format!("--jobs {jobs}: {name} differs"));
            }
        }
    }
    verdict(7, &format!("{} files byte-identical over {} runs with --jobs 1 and 8", first.len(), runs.len()), &failures);
}

// ---------------------------------------------------------------- 9

/// Set `COMSIEVE_PY150` to a directory holding the Py150 files to run this.
#[test]
fn criterion_09_py150_docstring_share() {
    let Some(dir) = std::env::var_os("COMSIEVE_PY150") else {
        println!("criterion 9: SKIP set COMSIEVE_PY150 to a Py150 checkout");
        return;
    };
    let root = PathBuf::from(dir);
    let walk = walk_corpus(&root, "py").unwrap();
    let (mut docs, mut all) = (0usize, 0usize);
    for chunk in walk.paths.chunks(512) {
        for f in extract_files(&root, chunk).into_iter().flatten() {
            all += f.units.len();
            docs += f.units.iter().filter(|u| u.kind == CommentKind::Docstring).count();
        }
    }
    let share = docs as f64 / all.max(1) as f64;
    let failures = if (0.25..=0.33).contains(&share) {
        Vec::new()
    } else {
        vec![format!("docstring share {share:.3}")]
    };
    verdict(9, &format!("{docs} docstrings of {all} comments ({:.1}%)", share * 100.0), &failures);
}

// ---------------------------------------------------------------- 10

const PLANTED_CODE: &[&str] = &[
    "x = 5 and y = compute(x, 10) before the loop",
    "self.value = parse_header(buf, 20) if n == 3",
    "call result = client.fetch(url, 30) then set k = 2",
    "use md5 hash 3f2a9c4d1e7b8f60 with x2y3 as key 42",
    "tmp = np.zeros(64) and i = 0 for the buffer",
];

const PLANTED_FOREIGN: &[&str] = &[
    "Renvoie la liste des fichiers modifiés depuis la dernière version.",
    "Devuelve el número de filas que se han escrito en el archivo.",
    "Gibt die Anzahl der Zeilen zurück, die geschrieben wurden.",
    "Restituisce il valore salvato nella cache se esiste ancora.",
    "Retorna a lista de usuários que estão conectados agora.",
];

fn planted_units(start_id: u64) -> Vec<CommentUnit> {
    let mut units = Vec::new();
    for rep in 0..12 {
        for (k, t) in PLANTED_CODE.iter().chain(PLANTED_FOREIGN).enumerate() {
            // vary one token so the copies survive deduplication
            let text = format!("{t} ({})", ["one", "two", "three", "four", "five", "six"][rep % 6]);
            let text = if rep >= 6 { text.replace('(', "[").replace(')', "]") + " again" } else { text };
            units.push(CommentUnit {
                id: 0,
                file: format!("planted/p{rep}.py"),
                start_line: 1 + 3 * k,
                end_line: 1 + 3 * k,
                column: 0,
                kind: CommentKind::LineBlock,
                raw_text: text,
            });
        }
    }
    number_units(&mut units, start_id);
    units
}

fn generations(units: &[CommentUnit], config: &PipelineConfig) -> (Vec<GenerationResult>, Vec<Vec<String>>) {
    let records = run(units, config);
    let sentences: Vec<Vec<String>> = units
        .iter()
        .zip(&records)
        .filter(|(_, r)| r.is_kept())
        .flat_map(|(u, _)| split_sentences(&u.raw_text, 4))
        .collect();
    let split = holdout_split(&sentences, sentences.len() / 3, 42);
    let model = NGramModel::train(&split.train);
    let results = split
        .prefixes()
        .iter()
        .map(|p| model.complete(p, 0.9, 40))
        .collect();
    (results, split.held_out)
}

#[test]
fn criterion_10_filtering_impact() {
    let mut units = mini_units();
    let next = units.len() as u64;
    units.extend(planted_units(next));
    let langid = Classifier::shared().langid();
    let (basic_gen, basic_refs) = generations(&units, &PipelineConfig::basic());
    let (adv_gen, adv_refs) = generations(&units, &PipelineConfig::advanced());
    let basic = analyze_generations(&basic_gen, &basic_refs, langid);
    let advanced = analyze_generations(&adv_gen, &adv_refs, langid);
    let mut failures = Vec::new();
    if advanced.code_artifacts.count >= basic.code_artifacts.count {
        failures.push(format!(
            "code artifacts: advanced {} vs basic {}",
            advanced.code_artifacts.count, basic.code_artifacts.count
        ));
    }
    if advanced.non_english.count >= basic.non_english.count {
        failures.push(format!(
            "non-English: advanced {} vs basic {}",
            advanced.non_english.count, basic.non_english.count
        ));
    }
    verdict(
        10,
        &format!(
            "code artifacts {} -> {}, non-English {} -> {} ({} vs {} generations)",
            basic.code_artifacts.count,
            advanced.code_artifacts.count,
            basic.non_english.count,
            advanced.non_english.count,
            basic.total,
            advanced.total
        ),
        &failures,
    );
}

// ---------------------------------------------------------------- extraction oracle

#[test]
fn docstrings_match_the_ast_oracle() {
    let mut failures = Vec::new();
    for (dir, oracle) in [("docstrings", "oracles/docstrings.json"), ("mini", "oracles/mini_docstrings.json")] {
        let expected: Value = serde_json::from_str(&std::fs::read_to_string(data(oracle)).unwrap()).unwrap();
        for (file, want) in expected.as_object().unwrap() {
            let text = std::fs::read_to_string(data(dir).join(file)).unwrap();
            let units = extract_from_text(file, &text).units;
            let lines = |kind| -> Vec<u64> {
                units.iter().filter(|u| u.kind == kind).map(|u| u.start_line as u64).collect()
            };
            let as_vec = |v: &Value| -> Vec<u64> { v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect() };
            if lines(CommentKind::Docstring) != as_vec(&want["docstrings"]) {
                failures.push(format!("{dir}/{file}: docstrings {:?}", lines(CommentKind::Docstring)));
            }
            if lines(CommentKind::LineBlock) != as_vec(&want["comments"]) {
                failures.push(format!("{dir}/{file}: comments {:?}", lines(CommentKind::LineBlock)));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
