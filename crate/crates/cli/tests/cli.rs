use std::path::Path;
use std::process::{Command, Output};

fn comsieve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_comsieve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = comsieve(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_tree(root: &Path) {
    std::fs::create_dir_all(root.join("pkg")).unwrap();
    std::fs::write(
        root.join("pkg/core.py"),
        "# Copyright 2020 Example Corp. All rights reserved.\n\
         import os\n\
         \n\
         def load(path):\n    \
             \"\"\"Read the whole file and return its lines as a list.\"\"\"\n    \
             # open the file for reading before parsing it\n    \
             return open(path).read().splitlines()\n\
         \n\
         # x = compute(a, b)\n\
         \n\
         # Ceci est un commentaire en francais sans aucun mot anglais\n",
    )
    .unwrap();
    std::fs::write(
        root.join("util.py"),
        "def f():\n    \"\"\"Return the first row of the table when it exists.\"\"\"\n    \
         # open the file for reading before parsing it\n    return 1\n",
    )
    .unwrap();
    std::fs::write(root.join("broken.py"), b"\x00\x01\x02").unwrap();
}

#[test]
fn version_reports_rules() {
    let out = ok(&["--version"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("comsieve "), "{text}");
    assert!(text.contains("rules "), "{text}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(comsieve(&["nope"]).status.code(), Some(2));
    assert_eq!(comsieve(&[]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.jsonl");
    let missing = dir.path().join("missing");
    let r = comsieve(&["extract", "--root", p(&missing), "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(2));
    let r = comsieve(&["filter", "--mode", "fancy", "--in", p(&out), "--out", p(&out), "--report", p(&out)]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn malformed_units_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.jsonl");
    std::fs::write(&input, "{\"id\":0}\n").unwrap();
    let out = dir.path().join("r.jsonl");
    let rep = dir.path().join("rep.json");
    let r = comsieve(&["filter", "--mode", "basic", "--in", p(&input), "--out", p(&out), "--report", p(&rep)]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 1"));
}

#[test]
fn full_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let src = d.join("src");
    write_tree(&src);
    let units = d.join("units.jsonl");
    ok(&["extract", "--root", p(&src), "--out", p(&units)]);

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("units.jsonl.ingest.json")).unwrap()).unwrap();
    assert_eq!(report["files_opened"], 2);
    assert_eq!(report["files_skipped"], 1);
    let loc = std::fs::read_to_string(d.join("units.jsonl.loc.csv")).unwrap();
    assert_eq!(loc, "file,loc\npkg/core.py,11\nutil.py,4\n");
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&units)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let ids: Vec<u64> = lines.iter().map(|v| v["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, (0..lines.len() as u64).collect::<Vec<_>>());
    assert!(d.join("units.jsonl.manifest.json").exists());

    let recs = d.join("rec.jsonl");
    let rep = d.join("rep.json");
    ok(&["filter", "--mode", "advanced", "--in", p(&units), "--out", p(&recs), "--report", p(&rep)]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let summary = &report["summary"];
    assert_eq!(summary["comments"].as_u64().unwrap() as usize, lines.len());
    let reasons = &summary["drop_reasons"];
    assert_eq!(reasons["Copyright"], 1);
    assert_eq!(reasons["NonEnglish"], 1);
    assert_eq!(reasons["Duplicate"], 1);
    assert!(reasons["CodeAssignment"].as_u64().unwrap_or(0) + reasons["CodeCallsite"].as_u64().unwrap_or(0) >= 1);
    let sentences = std::fs::read_to_string(d.join("rec.jsonl.sentences.txt")).unwrap();
    assert!(sentences.contains("read the whole file and return its lines as a list"));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("rec.jsonl.manifest.json")).unwrap()).unwrap();
    for key in ["command", "tool_version", "rules_version", "jobs", "config", "inputs", "outputs", "duration_secs"] {
        assert!(manifest.get(key).is_some(), "manifest lacks {key}");
    }

    let prefix = d.join("st");
    ok(&["stats", "--in", p(&units), "--loc", p(&d.join("units.jsonl.loc.csv")), "--out-prefix", p(&prefix), "--records", p(&recs)]);
    for s in ["categories.json", "categories.txt", "categories.csv", "histogram.json", "histogram.csv", "histogram.txt"] {
        assert!(d.join(format!("st.{s}")).exists(), "{s}");
    }
    let hist = std::fs::read_to_string(d.join("st.histogram.csv")).unwrap();
    assert!(hist.lines().count() > 10);
}

#[test]
fn train_generate_score() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut corpus = String::new();
    for i in 0..40 {
        corpus.push_str(&format!("return the value of field number {i} from the record\n"));
        corpus.push_str("open the file for reading and parse each line\n");
    }
    let sents = d.join("s.txt");
    std::fs::write(&sents, corpus).unwrap();
    let model = d.join("m.json");
    ok(&["train", "--in", p(&sents), "--model", p(&model), "--holdout", "5", "--seed", "3"]);
    let prefixes = std::fs::read_to_string(d.join("m.json.prefixes.txt")).unwrap();
    assert_eq!(prefixes.lines().count(), 5);
    assert!(prefixes.lines().all(|l| l.split(' ').count() == 4));

    // same seed, same split
    let model2 = d.join("m2.json");
    ok(&["train", "--in", p(&sents), "--model", p(&model2), "--holdout", "5", "--seed", "3"]);
    assert_eq!(prefixes, std::fs::read_to_string(d.join("m2.json.prefixes.txt")).unwrap());
    assert_eq!(std::fs::read(&model).unwrap(), std::fs::read(&model2).unwrap());

    let gen = d.join("gen.txt");
    let details = d.join("gen.jsonl");
    ok(&["generate", "--model", p(&model), "--prefixes", p(&d.join("m.json.prefixes.txt")), "--out", p(&gen), "--details", p(&details)]);
    let generated = std::fs::read_to_string(&gen).unwrap();
    assert_eq!(generated.lines().count(), 5);
    for (g, pre) in generated.lines().zip(prefixes.lines()) {
        assert!(g.starts_with(pre), "{g} / {pre}");
    }
    assert!(generated.contains("open the file for reading and parse each line"));

    let refs = d.join("m.json.references.txt");
    ok(&["bleu", "--candidates", p(&gen), "--references", p(&refs), "--out-prefix", p(&d.join("b"))]);
    let bleu: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("b.bleu.json")).unwrap()).unwrap();
    assert_eq!(bleu["scores"].as_array().unwrap().len(), 5);
    assert_eq!(bleu["histogram"].as_array().unwrap().len(), 20);

    ok(&["analyze", "--candidates", p(&gen), "--references", p(&refs), "--out", p(&d.join("an.json"))]);
    let an: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("an.json")).unwrap()).unwrap();
    assert_eq!(an["total"], 5);

    let short = d.join("short.txt");
    std::fs::write(&short, "only three tokens\n").unwrap();
    let r = comsieve(&["generate", "--model", p(&model), "--prefixes", p(&short), "--out", p(&gen)]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn overlap_of_four_vocabularies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let files: Vec<_> = [("a", "x\ny\nz\n"), ("b", "x\ny\n"), ("c", "x\n"), ("d", "x\nw\n")]
        .iter()
        .map(|(n, body)| {
            let f = d.join(format!("{n}.txt"));
            std::fs::write(&f, body).unwrap();
            f
        })
        .collect();
    let list = files.iter().map(|f| p(f)).collect::<Vec<_>>().join(",");
    let out = d.join("ov.json");
    ok(&["vocab-overlap", "--models", &list, "--out", p(&out)]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["union"], 4);
    let regions = v["regions"].as_array().unwrap();
    assert_eq!(regions.len(), 15);
    assert_eq!(regions.iter().map(|r| r["count"].as_u64().unwrap()).sum::<u64>(), 4);
    let r = comsieve(&["vocab-overlap", "--models", p(&files[0]), "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(2));
}
